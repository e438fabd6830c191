"""Seeded random builders for fields, measures, mappings, meshes and curves.

Tests and the verification harness draw their data here so that both see
the same distributions.  Every builder takes a numpy Generator as its
first argument and touches it a deterministic number of times; scales are
chosen so values, gradients and Hessians stay O(1) and the finite-
difference oracles keep their error budgets.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .curves import ActionFunctional, Curve, kinetic_density, polynomial_curve
from .errors import InvalidArgumentError
from .fields import (BumpField, PolynomialField, ScalarField, SinProfile,
                     TanhProfile, bump, f_compose, f_mul, f_scale)
from .forms import DifferentialForm, coordinate_form, form_from_coeffs
from .geometry import GeometryInstance
from .mappings import LabeledSpace, MappingFunctional, MappingPoint
from .measures import MeasureEnsemble, MeasureFunctional, ParticleMeasure
from .simplicial import (SimplicialManifold, SubmanifoldFunctional, disk_mesh,
                         loop_mesh, square_mesh, triangle_mesh)
from .smooth import (ConformalMetric, ConstantMetric, RiemannianMetric,
                     VectorField, euclidean_metric, lie_bracket,
                     scaled_bump_field)

__all__ = [
    "random_polynomial",
    "random_compact_scalar",
    "random_psi",
    "random_vector_field",
    "random_measure",
    "random_measure_functional",
    "random_metric",
    "random_ensemble",
    "random_labeled_space",
    "random_mapping_point",
    "random_mapping_functional",
    "random_form",
    "random_mesh",
    "random_submanifold_functional",
    "random_curve",
    "random_action_functional",
    "measure_geometry",
    "mapping_geometry",
    "curve_geometry",
    "submanifold_geometry",
]


def _exponent_tuples(rng: np.random.Generator, dim: int, degree: int,
                     count: int) -> list[tuple]:
    out = []
    for _ in range(count):
        total = int(rng.integers(0, degree + 1))
        exps = [0] * dim
        for _ in range(total):
            exps[int(rng.integers(0, dim))] += 1
        out.append(tuple(exps))
    return out


def random_polynomial(rng: np.random.Generator, dim: int, degree: int = 3,
                      scale: float = 1.0) -> PolynomialField:
    """A few monomials of total degree <= degree, plus a linear part so the
    gradient never degenerates."""
    terms: dict = {}
    for exps in _exponent_tuples(rng, dim, degree, count=3):
        terms[exps] = terms.get(exps, 0.0) + scale * float(rng.normal(0, 0.6))
    for j in range(dim):
        e = tuple(1 if t == j else 0 for t in range(dim))
        terms[e] = terms.get(e, 0.0) + scale * float(rng.normal(0, 0.4))
    return PolynomialField(dim, terms)


def random_compact_scalar(rng: np.random.Generator, dim: int,
                          radius_range=(1.8, 3.2)) -> ScalarField:
    """bump * polynomial: compactly supported with exact oracles to third
    order; the support ball always covers the unit ball around the origin
    so sampled atoms and curves stay visible to it."""
    center = rng.normal(0.0, 0.25, size=dim)
    radius = float(rng.uniform(*radius_range))
    return f_mul(BumpField(center, radius), random_polynomial(rng, dim))


def random_psi(rng: np.random.Generator, n: int, style: str | None = None,
               compact: bool = False) -> ScalarField:
    """Outer function on the pairing vector: polynomial, tanh o polynomial,
    or sin o polynomial; ``compact`` switches to bump * polynomial."""
    if compact:
        return f_mul(BumpField(rng.normal(0.0, 0.3, size=n),
                               float(rng.uniform(4.0, 7.0))),
                     random_polynomial(rng, n, degree=2))
    style = style or ("poly", "tanh", "sin")[int(rng.integers(0, 3))]
    if style == "poly":
        return random_polynomial(rng, n)
    inner = random_polynomial(rng, n, degree=2, scale=0.5)
    if style == "tanh":
        return f_compose(TanhProfile(), inner)
    if style == "sin":
        return f_compose(SinProfile(float(rng.uniform(0.6, 1.4))), inner)
    raise InvalidArgumentError(f"unknown psi style {style!r}")


def random_vector_field(rng: np.random.Generator, dim: int,
                        scale: float = 0.6) -> VectorField:
    """Compactly supported bump * polynomial components (complete)."""
    center = rng.normal(0.0, 0.3, size=dim)
    radius = float(rng.uniform(2.0, 3.5))
    coeffs = []
    for _ in range(dim):
        terms: dict = {}
        for exps in _exponent_tuples(rng, dim, 2, count=2):
            terms[exps] = terms.get(exps, 0.0) + scale * float(rng.normal(0, 0.7))
        zero = tuple([0] * dim)
        terms[zero] = terms.get(zero, 0.0) + scale * float(rng.normal(0, 0.4))
        coeffs.append(terms)
    return scaled_bump_field(center, radius, coeffs)


def random_measure(rng: np.random.Generator, dim: int,
                   max_atoms: int = 5) -> ParticleMeasure:
    n = int(rng.integers(1, max_atoms + 1))
    points = rng.normal(0.0, 0.5, size=(n, dim))
    weights = rng.uniform(0.2, 1.2, size=n)
    return ParticleMeasure(points, weights)


def random_measure_functional(rng: np.random.Generator, dim: int, n: int,
                              compact_psi: bool = False) -> MeasureFunctional:
    gens = [random_compact_scalar(rng, dim) for _ in range(n)]
    return MeasureFunctional(random_psi(rng, n, compact=compact_psi), gens)


def random_metric(rng: np.random.Generator, dim: int) -> RiemannianMetric:
    kind = int(rng.integers(0, 3))
    if kind == 0:
        return euclidean_metric(dim)
    if kind == 1:
        A = rng.normal(0.0, 0.4, size=(dim, dim))
        return ConstantMetric(np.eye(dim) + A @ A.T)
    lam = random_compact_scalar(rng, dim)
    return ConformalMetric(f_scale(0.25, lam))


def random_ensemble(rng: np.random.Generator, dim: int,
                    size: int = 3) -> MeasureEnsemble:
    measures = [random_measure(rng, dim) for _ in range(size)]
    probs = rng.uniform(0.2, 1.0, size=size)
    probs = probs / probs.sum()
    probs[-1] = 1.0 - probs[:-1].sum()
    return MeasureEnsemble(measures, probs)


def random_labeled_space(rng: np.random.Generator, size: int,
                         n_measures: int = 3) -> LabeledSpace:
    measures = {f"mu{j}": rng.uniform(0.1, 1.0, size=size)
                for j in range(n_measures)}
    return LabeledSpace(size, measures)


def random_mapping_point(rng: np.random.Generator, size: int,
                         dim: int) -> MappingPoint:
    return MappingPoint(rng.normal(0.0, 0.5, size=(size, dim)))


def random_mapping_functional(rng: np.random.Generator, dim: int, arity: int,
                              space: LabeledSpace) -> MappingFunctional:
    names = sorted(space.measures)
    picks = [space.measures[names[int(rng.integers(0, len(names)))]]
             for _ in range(arity)]
    phi = random_compact_scalar(rng, dim * arity, radius_range=(2.5, 4.0))
    return MappingFunctional(phi, picks, dim)


def random_form(rng: np.random.Generator, dim: int, degree: int,
                polynomial: bool = False) -> DifferentialForm:
    coeffs = {}
    for I in combinations(range(dim), degree):
        if rng.uniform() < 0.25 and len(coeffs) > 0:
            continue  # leave some indices empty
        if polynomial:
            coeffs[I] = random_polynomial(rng, dim, degree=3, scale=0.7)
        else:
            coeffs[I] = random_compact_scalar(rng, dim)
    return form_from_coeffs(dim, degree, coeffs)


def random_mesh(rng: np.random.Generator, kind: str | None = None,
                level: int | None = None) -> SimplicialManifold:
    kind = kind or ("square", "triangle", "disk", "loop")[int(rng.integers(0, 4))]
    if kind == "loop":
        return loop_mesh(int(rng.integers(8, 24)))
    lvl = int(rng.integers(0, 3)) if level is None else level
    return {"square": square_mesh, "triangle": triangle_mesh,
            "disk": disk_mesh}[kind](lvl)


def random_submanifold_functional(rng: np.random.Generator, degree: int,
                                  dim: int = 2, n: int = 2,
                                  polynomial: bool = False) -> SubmanifoldFunctional:
    gens = [random_form(rng, dim, degree, polynomial=polynomial)
            for _ in range(n)]
    psi = random_polynomial(rng, n, degree=2) if polynomial \
        else random_psi(rng, n)
    return SubmanifoldFunctional(psi, gens)


def random_curve(rng: np.random.Generator, dim: int) -> Curve:
    deg = int(rng.integers(1, 4))
    coeffs = rng.normal(0.0, 0.45, size=(deg + 1, dim))
    b = float(rng.uniform(0.8, 2.2))
    return polynomial_curve(coeffs, 0.0, b)


def random_action_functional(rng: np.random.Generator, dim: int,
                             n: int) -> ActionFunctional:
    densities: list[ScalarField] = []
    for j in range(n):
        if j == 0 and rng.uniform() < 0.5:
            densities.append(kinetic_density(dim))
        else:
            densities.append(random_compact_scalar(rng, 2 * dim,
                                                   radius_range=(3.0, 5.0)))
    return ActionFunctional(random_psi(rng, n), densities)


# ---------------------------------------------------------------------------
# instance records for the instance-independent layer
# ---------------------------------------------------------------------------

def _unit_measure_functional(dim: int) -> MeasureFunctional:
    one = PolynomialField(1, {(0,): 1.0})
    return MeasureFunctional(one, [bump(np.zeros(dim), 2.0)], label="1")


def measure_geometry(dim: int = 2, n: int = 2) -> GeometryInstance:
    return GeometryInstance(
        name=f"measures(R^{dim})",
        sample_point=lambda rng: random_measure(rng, dim),
        sample_field=lambda rng: random_vector_field(rng, dim),
        sample_element=lambda rng: random_measure_functional(
            rng, dim, int(rng.integers(1, n + 1))),
        apply_field=lambda v, F: F.derive(v),
        bracket=lie_bracket,
        unit=_unit_measure_functional(dim),
    )


def mapping_geometry(dim: int = 2, size: int = 3,
                     arity: int = 2) -> GeometryInstance:
    space_rng = np.random.default_rng(0)  # the label space is part of the instance
    space = random_labeled_space(space_rng, size)
    mass = float(space.measures["mu0"].sum())
    unit = MappingFunctional(
        PolynomialField(dim, {tuple([0] * dim): 1.0 / mass}),
        [space.measures["mu0"]], dim, label="1")
    return GeometryInstance(
        name=f"mappings(Y->R^{dim})",
        sample_point=lambda rng: random_mapping_point(rng, size, dim),
        sample_field=lambda rng: random_vector_field(rng, dim),
        sample_element=lambda rng: random_mapping_functional(
            rng, dim, int(rng.integers(1, arity + 1)), space),
        apply_field=lambda v, F: F.derive(v),
        bracket=lie_bracket,
        unit=unit,
    )


def curve_geometry(dim: int = 2, n: int = 2) -> GeometryInstance:
    one = PolynomialField(1, {(0,): 1.0})
    unit = ActionFunctional(one, [kinetic_density(dim)], label="1")
    return GeometryInstance(
        name=f"curves(R^{dim})",
        sample_point=lambda rng: random_curve(rng, dim),
        sample_field=lambda rng: random_vector_field(rng, dim),
        sample_element=lambda rng: random_action_functional(rng, dim, n),
        apply_field=lambda v, F: F.derive(v),
        bracket=lie_bracket,
        unit=unit,
    )


def submanifold_geometry(kind: str = "square", level: int = 1,
                         n: int = 2) -> GeometryInstance:
    degree = 1 if kind == "loop" else 2
    if kind == "loop":
        sample_point = lambda rng: loop_mesh(int(rng.integers(8, 20)))
    else:
        builder = {"square": square_mesh, "triangle": triangle_mesh,
                   "disk": disk_mesh}[kind]
        sample_point = lambda rng: builder(level)
    one = PolynomialField(1, {(0,): 1.0})
    gen = coordinate_form(2, (0, 1)) if degree == 2 else coordinate_form(2, (0,))
    unit = SubmanifoldFunctional(one, [gen], label="1")
    return GeometryInstance(
        name=f"submanifolds({kind})",
        sample_point=sample_point,
        sample_field=lambda rng: random_vector_field(rng, 2),
        sample_element=lambda rng: random_submanifold_functional(
            rng, degree, n=n),
        apply_field=lambda v, F: F.derive(v),
        bracket=lie_bracket,
        unit=unit,
    )
