"""Instance-independent layer: derivations, generated forms, Cartan calculus.

A geometry is a commutative algebra of functionals on some set together
with a family of derivations indexed by vector fields.  This module never
looks inside points or elements; it only uses the element protocol
(``value/derive-via-instance/add/mul/scale``) and the instance record
below.  Forms are finite sums of terms a0 * d a1 ^ ... ^ d ak and evaluate
through determinants of derivation-against-element matrices, which makes
anticommutativity and the degeneracy bound rank facts rather than axioms.

Equality of elements, derivations and forms is decided probabilistically:
both sides are evaluated on a fixed number of seeded probes and declared
equal when every residual is below tolerance.  That is a Monte-Carlo
soundness bound, not a proof; callers pick the probe count.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

from .errors import InvalidArgumentError, UnsupportedOperationError
from .smooth import VectorField

__all__ = [
    "GeometryInstance",
    "Derivation",
    "bracket_derivations",
    "Form",
    "eval_form",
    "wedge",
    "exterior_d",
    "lie_derivative",
    "interior_product",
    "cartan_residual",
    "interior_bracket_residual",
    "GeometryMorphism",
    "pushforward_form",
    "pushforward_commutes_residual",
    "tangent_equal_probe",
    "degeneracy_residual",
]


@dataclass(frozen=True)
class GeometryInstance:
    """Bundle of samplers and actions one concrete instance provides.

    apply_field(v, a) is the derivation of the element a along the vector
    field v; bracket is the Lie bracket on the generating field family.
    The samplers take a numpy Generator so consumers can clone streams.
    """

    name: str
    sample_point: Callable[[np.random.Generator], Any]
    sample_field: Callable[[np.random.Generator], VectorField]
    sample_element: Callable[[np.random.Generator], Any]
    apply_field: Callable[[VectorField, Any], Any]
    bracket: Callable[[VectorField, VectorField], VectorField]
    unit: Any

    def zero_element(self):
        return self.unit.scale(0.0)


class Derivation:
    """Finite combination sum_j c_j * d_{v_j} with c_j a number or an
    algebra element (module coefficients)."""

    def __init__(self, terms: Sequence[tuple]):
        self.terms = tuple((c, v) for c, v in terms)

    @classmethod
    def basic(cls, v: VectorField) -> "Derivation":
        return cls([(1.0, v)])

    @classmethod
    def combination(cls, coeffs, fields) -> "Derivation":
        if len(coeffs) != len(fields):
            raise InvalidArgumentError("coefficient/field count mismatch")
        return cls(list(zip(coeffs, fields)))

    def apply(self, inst: GeometryInstance, elem):
        out = None
        for c, v in self.terms:
            da = inst.apply_field(v, elem)
            if isinstance(c, (int, float)):
                da = da.scale(float(c))
            else:
                da = c.mul(da)
            out = da if out is None else out.add(da)
        return out if out is not None else inst.zero_element()

    def scale(self, c: float) -> "Derivation":
        return Derivation([(coef * c if isinstance(coef, (int, float))
                            else coef.scale(c), v) for coef, v in self.terms])

    def add(self, other: "Derivation") -> "Derivation":
        return Derivation(self.terms + other.terms)


def _coeff_mul(inst: GeometryInstance, a, b):
    """Product of two module coefficients (numbers or elements)."""
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        return float(a) * float(b)
    if isinstance(a, (int, float)):
        return b.scale(float(a))
    if isinstance(b, (int, float)):
        return a.scale(float(b))
    return a.mul(b)


def bracket_derivations(inst: GeometryInstance, d1: Derivation,
                        d2: Derivation) -> Derivation:
    """[d1, d2] expanded through the module structure:
    [a v, b w] = a d_v(b) w - b d_w(a) v + (a b) [v, w]."""
    terms = []
    for a, v in d1.terms:
        for b, w in d2.terms:
            if not isinstance(b, (int, float)):
                db = inst.apply_field(v, b)
                terms.append((_coeff_mul(inst, a, db), w))
            if not isinstance(a, (int, float)):
                da = inst.apply_field(w, a)
                terms.append((_coeff_mul(inst, b, da.scale(-1.0)), v))
            terms.append((_coeff_mul(inst, a, b), inst.bracket(v, w)))
    return Derivation(terms)


# ---------------------------------------------------------------------------
# generated forms
# ---------------------------------------------------------------------------

class Form:
    """Finite sum of generated terms (a0, (a1, ..., ak))."""

    def __init__(self, degree: int, terms: Sequence[tuple]):
        self.degree = int(degree)
        clean = []
        for a0, rest in terms:
            rest = tuple(rest)
            if len(rest) != degree:
                raise InvalidArgumentError(
                    f"term arity {len(rest)} does not match degree {degree}")
            clean.append((a0, rest))
        self.terms = tuple(clean)

    @classmethod
    def generated(cls, a0, rest=()) -> "Form":
        return cls(len(tuple(rest)), [(a0, tuple(rest))])

    def __add__(self, other: "Form") -> "Form":
        if other.degree != self.degree:
            raise InvalidArgumentError("can only add forms of equal degree")
        return Form(self.degree, self.terms + other.terms)

    def scale(self, c: float) -> "Form":
        return Form(self.degree, [(a0.scale(c), rest) for a0, rest in self.terms])

    def __sub__(self, other: "Form") -> "Form":
        return self + other.scale(-1.0)


def eval_form(inst: GeometryInstance, form: Form, point,
              derivations: Sequence[Derivation]) -> float:
    """omega_p(alpha_1, ..., alpha_k) = sum of a0(p) det[alpha_i(a_j)(p)]."""
    k = form.degree
    if len(derivations) != k:
        raise InvalidArgumentError(f"expected {k} derivations, got {len(derivations)}")
    total = 0.0
    for a0, rest in form.terms:
        head = a0.value(point)
        if head == 0.0:
            continue
        if k == 0:
            total += head
            continue
        M = np.empty((k, k))
        for i, alph in enumerate(derivations):
            for j, aj in enumerate(rest):
                M[i, j] = alph.apply(inst, aj).value(point)
        total += head * float(np.linalg.det(M))
    return total


def wedge(f1: Form, f2: Form) -> Form:
    """Concatenation of generator lists with multiplied head coefficients;
    evaluation agrees with the alternation-normalized tensor product."""
    terms = []
    for a0, ra in f1.terms:
        for b0, rb in f2.terms:
            terms.append((a0.mul(b0), ra + rb))
    return Form(f1.degree + f2.degree, terms)


def exterior_d(inst: GeometryInstance, form: Form) -> Form:
    """d(a0 da1 ^ ... ^ dak) = 1 da0 ^ da1 ^ ... ^ dak."""
    terms = [(inst.unit, (a0,) + rest) for a0, rest in form.terms]
    return Form(form.degree + 1, terms)


def lie_derivative(inst: GeometryInstance, d: Derivation, form: Form) -> Form:
    """Degree-preserving derivative: Leibniz over every slot of each term."""
    out = []
    for a0, rest in form.terms:
        out.append((d.apply(inst, a0), rest))
        for i in range(len(rest)):
            out.append((a0, rest[:i] + (d.apply(inst, rest[i]),) + rest[i + 1:]))
    return Form(form.degree, out)


def interior_product(inst: GeometryInstance, d: Derivation, form: Form) -> Form:
    """i_d(a0 da1 ^ ... ^ dak) = sum_i (-1)^{i+1} (a0 * d(a_i)) d(others)."""
    if form.degree == 0:
        raise InvalidArgumentError("interior product needs degree >= 1")
    out = []
    for a0, rest in form.terms:
        for i in range(len(rest)):
            coeff = a0.mul(d.apply(inst, rest[i]))
            if i % 2 == 1:
                coeff = coeff.scale(-1.0)
            out.append((coeff, rest[:i] + rest[i + 1:]))
    return Form(form.degree - 1, out)


def _residual_scale(values) -> float:
    return 1.0 + max((abs(v) for v in values), default=0.0)


def cartan_residual(inst: GeometryInstance, d: Derivation, form: Form,
                    probes: Sequence[tuple]) -> float:
    """Max relative residual of L_d = i_d after d + d after i_d over probes.

    Each probe is (point, tuple of argument derivations of the form's degree).
    """
    lhs_form = lie_derivative(inst, d, form)
    terms = []
    if form.degree >= 1:
        terms.append(exterior_d(inst, interior_product(inst, d, form)))
    terms.append(interior_product(inst, d, exterior_d(inst, form)))
    worst = 0.0
    for point, args in probes:
        lhs = eval_form(inst, lhs_form, point, args)
        rhs = sum(eval_form(inst, t, point, args) for t in terms)
        worst = max(worst, abs(lhs - rhs) / _residual_scale((lhs, rhs)))
    return worst


def interior_bracket_residual(inst: GeometryInstance, d1: Derivation,
                              d2: Derivation, form: Form,
                              probes: Sequence[tuple]) -> float:
    """Max relative residual of i_{[d1,d2]} = L_{d1} i_{d2} - i_{d2} L_{d1}."""
    br = bracket_derivations(inst, d1, d2)
    lhs_form = interior_product(inst, br, form)
    rhs_a = lie_derivative(inst, d1, interior_product(inst, d2, form))
    rhs_b = interior_product(inst, d2, lie_derivative(inst, d1, form))
    worst = 0.0
    for point, args in probes:
        lhs = eval_form(inst, lhs_form, point, args)
        rhs = eval_form(inst, rhs_a, point, args) - eval_form(inst, rhs_b, point, args)
        worst = max(worst, abs(lhs - rhs) / _residual_scale((lhs, rhs)))
    return worst


# ---------------------------------------------------------------------------
# morphisms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GeometryMorphism:
    """Algebra morphism between two instances.

    map_element pushes an element of the source algebra to the target;
    map_point sends a target point to the source point it evaluates
    through; correspond sends a target vector field to the source field
    whose derivation intertwines with map_element.  correspond may raise
    KeyError for fields without a registered counterpart.
    """

    source: GeometryInstance
    target: GeometryInstance
    map_element: Callable[[Any], Any]
    map_point: Callable[[Any], Any]
    correspond: Callable[[VectorField], VectorField]


def pushforward_form(morphism: GeometryMorphism, form: Form) -> Form:
    f = morphism.map_element
    return Form(form.degree,
                [(f(a0), tuple(f(a) for a in rest)) for a0, rest in form.terms])


def _transport_derivation(morphism: GeometryMorphism, d: Derivation) -> Derivation:
    terms = []
    for c, v in d.terms:
        try:
            w = morphism.correspond(v)
        except KeyError as exc:
            raise UnsupportedOperationError(
                "no corresponding source field registered for a requested "
                "derivation") from exc
        if not isinstance(c, (int, float)):
            raise UnsupportedOperationError(
                "pushforward transport supports scalar coefficients only")
        terms.append((c, w))
    return Derivation(terms)


def pushforward_commutes_residual(morphism: GeometryMorphism, form: Form,
                                  probes: Sequence[tuple]) -> float:
    """Residual of (pushforward omega)_q(beta...) = omega_{f(q)}(correspond(beta)...)
    over the probes.  Commutation with the exterior derivative is the same
    check applied to exterior_d(form) with probes one slot wider."""
    pf = pushforward_form(morphism, form)
    worst = 0.0
    for q, args in probes:
        lhs = eval_form(morphism.target, pf, q, args)
        src_args = [_transport_derivation(morphism, a) for a in args]
        rhs = eval_form(morphism.source, form, morphism.map_point(q), src_args)
        worst = max(worst, abs(lhs - rhs) / _residual_scale((lhs, rhs)))
    return worst


def tangent_equal_probe(inst: GeometryInstance, point, d1: Derivation,
                        d2: Derivation, probe_elements,
                        tol: float = 1e-9) -> tuple[bool, float]:
    """Whether d1 and d2 agree at the point on the probe elements, i.e.
    represent the same tangent vector there."""
    worst = 0.0
    for a in probe_elements:
        x = d1.apply(inst, a).value(point)
        y = d2.apply(inst, a).value(point)
        worst = max(worst, abs(x - y) / _residual_scale((x, y)))
    return worst <= tol, worst


def degeneracy_residual(inst: GeometryInstance, rank: int, rng) -> float:
    """Evaluate a (rank+1)-form on rank+1 derivations drawn from the module
    span of rank basic fields; the value must vanish (rank argument)."""
    fields = [inst.sample_field(rng) for _ in range(rank)]
    elems = [inst.sample_element(rng) for _ in range(rank + 2)]
    form = Form.generated(elems[0], elems[1:rank + 2])
    args = []
    for _ in range(rank + 1):
        coeffs = []
        for _ in range(rank):
            if rng.random() < 0.5:
                coeffs.append(float(rng.uniform(-2, 2)))
            else:
                coeffs.append(inst.sample_element(rng))
        args.append(Derivation.combination(coeffs, fields))
    p = inst.sample_point(rng)
    val = eval_form(inst, form, p, args)
    return abs(val)
