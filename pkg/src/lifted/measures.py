"""Functionals of particle measures and their lifted calculus.

A particle measure is a positive combination of point masses on R^m.  The
functionals are cylinder-shaped: F(mu) = psi(∫phi_1 dmu, ..., ∫phi_n dmu)
with compactly supported generators phi_i.  Transporting the measure by
the flow of a complete vector field v differentiates to another cylinder
functional (generators doubled by d_v phi_i, outer function replaced by
the chain-rule combination), which is what ``MeasureFunctional.derive``
returns.  On top of that sit the metric gradient, the induced quadratic
energy over a measure ensemble, and its contraction property.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .cylinder import PairingFunctional
from .errors import (DomainViolationError, InvalidArgumentError,
                     UnsupportedOperationError)
from .fields import Ball, Profile, ScalarField, f_add, f_compose, f_mul, f_scale, f_shift
from .geometry import Derivation
from .smooth import RiemannianMetric, VectorField, directional_derivative, flow, metric_gradient

__all__ = [
    "ParticleMeasure",
    "MeasureFunctional",
    "MeasureEnsemble",
    "pushforward_measure",
    "lifted_derivative",
    "convolve_measures",
    "convolution_rewrite",
    "push_measure",
    "embedding_rewrite",
    "density_map",
    "density_rewrite",
    "tangent_inner_product",
    "gradient",
    "dirichlet_form",
    "markov_defect",
    "read_particle_measure",
    "write_particle_measure",
]


class ParticleMeasure:
    """Finite positive combination of point masses: sum_i w_i delta_{x_i}."""

    def __init__(self, points, weights):
        points = np.asarray(points, dtype=float)
        weights = np.asarray(weights, dtype=float)
        if points.ndim != 2:
            raise InvalidArgumentError("points must be a (k, m) array")
        if weights.shape != (points.shape[0],):
            raise InvalidArgumentError("one weight per point is required")
        if points.shape[0] == 0:
            raise InvalidArgumentError("a particle measure needs at least one atom")
        if np.any(weights <= 0):
            raise DomainViolationError("weights must be strictly positive")
        self.points = points
        self.weights = weights

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    def integrate(self, phi: ScalarField) -> float:
        if phi.dim != self.dim:
            raise InvalidArgumentError("field/measure dimension mismatch")
        return float(self.weights @ phi._val(self.points))

    def map_points(self, fn) -> "ParticleMeasure":
        return ParticleMeasure(fn(self.points), self.weights.copy())

    def __repr__(self):
        return f"ParticleMeasure({self.points.shape[0]} atoms in R^{self.dim})"


def pushforward_measure(v: VectorField, t: float, mu: ParticleMeasure) -> ParticleMeasure:
    """Measure transported by the time-t flow of v (atoms move, weights stay)."""
    return ParticleMeasure(flow(v, t, mu.points), mu.weights.copy())


class MeasureFunctional(PairingFunctional):
    """F(mu) = psi(∫phi_1 dmu, ..., ∫phi_n dmu).

    Generators must be compactly supported; the lifted derivative insists
    on compactly supported vector fields (this instance keeps the strict
    generating family).
    """

    def __init__(self, psi: ScalarField, generators: Sequence[ScalarField],
                 label: str = ""):
        for g in generators:
            if not isinstance(g, ScalarField):
                raise InvalidArgumentError("generators must be scalar fields")
            if g.support is None:
                raise InvalidArgumentError(
                    "generators must carry a compact support ball")
        dims = {g.dim for g in generators}
        if len(dims) != 1:
            raise InvalidArgumentError("generators must share one base dimension")
        super().__init__(psi, generators, label=label)
        self.base_dim = dims.pop()

    @property
    def psi_compact(self) -> bool:
        return self.psi.support is not None

    def _pair(self, mu: ParticleMeasure) -> np.ndarray:
        vals = np.stack([g._val(mu.points) for g in self.generators], axis=0)
        return vals @ mu.weights

    def _derive_generator(self, v: VectorField, phi: ScalarField) -> ScalarField:
        return directional_derivative(v, phi)

    def _check_derive(self, v: VectorField) -> None:
        if v.support is None:
            raise UnsupportedOperationError(
                "the measure instance lifts derivatives only along compactly "
                "supported vector fields")


def lifted_derivative(v: VectorField, F: MeasureFunctional) -> MeasureFunctional:
    """d/dt at 0 of F(flow_t(v) applied to the measure), in closed form."""
    return F.derive(v)


# ---------------------------------------------------------------------------
# structure maps
# ---------------------------------------------------------------------------

def convolve_measures(mu: ParticleMeasure, nu: ParticleMeasure) -> ParticleMeasure:
    """Additive convolution: atoms x_i + y_j with weights w_i * u_j."""
    if mu.dim != nu.dim:
        raise InvalidArgumentError("measures must live on the same space")
    pts = (mu.points[:, None, :] + nu.points[None, :, :]).reshape(-1, mu.dim)
    wts = (mu.weights[:, None] * nu.weights[None, :]).reshape(-1)
    return ParticleMeasure(pts, wts)


def convolution_rewrite(nu: ParticleMeasure, F: MeasureFunctional) -> MeasureFunctional:
    """The functional mu -> F(mu * nu) in cylinder form: each generator is
    replaced by x -> sum_j u_j phi(x + y_j)."""
    gens = []
    for phi in F.generators:
        parts = [f_scale(float(u), f_shift(phi, y))
                 for y, u in zip(nu.points, nu.weights)]
        g = f_add(*parts) if len(parts) > 1 else parts[0]
        if g.support is None and phi.support is not None:
            balls = [Ball(phi.support.center - y, phi.support.radius)
                     for y in nu.points]
            from .fields import enclosing_ball
            g = g._replace_support(enclosing_ball(balls))
        gens.append(g)
    return MeasureFunctional(F.psi, gens, label=f"conv[{F.label}]")


def push_measure(emb, mu: ParticleMeasure) -> ParticleMeasure:
    """Image of the measure under a proper embedding (atoms move)."""
    return ParticleMeasure(emb.apply(mu.points), mu.weights.copy())


def embedding_rewrite(emb, F: MeasureFunctional) -> MeasureFunctional:
    """The functional mu' -> F(image of mu') on the embedded space, in
    cylinder form: generators are pulled back along the embedding."""
    gens = [emb.pullback_scalar(phi) for phi in F.generators]
    return MeasureFunctional(F.psi, gens, label=f"emb[{F.label}]")


def density_map(f: ScalarField, mu: ParticleMeasure) -> ParticleMeasure:
    """Reweight atoms by the nonnegative density f; zero-weight atoms drop."""
    vals = f._val(mu.points)
    if np.any(vals < 0):
        raise DomainViolationError("density must be nonnegative on the atoms")
    keep = vals > 0
    if not np.any(keep):
        raise DomainViolationError("density annihilates the whole measure")
    return ParticleMeasure(mu.points[keep], mu.weights[keep] * vals[keep])


def density_rewrite(f: ScalarField, F: MeasureFunctional) -> MeasureFunctional:
    """mu -> F(density_map(f, mu)) in cylinder form: generators f * phi_i."""
    gens = [f_mul(f, phi) for phi in F.generators]
    gens = [g if g.support is not None else g._replace_support(phi.support)
            for g, phi in zip(gens, F.generators)]
    return MeasureFunctional(F.psi, gens, label=f"dens[{F.label}]")


# ---------------------------------------------------------------------------
# metric structure
# ---------------------------------------------------------------------------

def tangent_inner_product(v: VectorField, w: VectorField, mu: ParticleMeasure,
                          g: RiemannianMetric) -> float:
    """∫ <v, w>_g dmu over the atoms."""
    G = g.matrix(mu.points)
    vv = v.eval(mu.points)
    ww = w.eval(mu.points)
    return float(np.einsum("n,ni,nij,nj->", mu.weights, vv, G, ww))


def gradient(F: MeasureFunctional, mu: ParticleMeasure, g: RiemannianMetric):
    """Metric gradient of F at mu.

    Returns (field, derivation): the vector field sum_i F_i(mu) grad_g phi_i
    representing the gradient tangent vector at mu, and the derivation
    sum_i F_i * d_{grad_g phi_i} whose coefficients are the partial
    functionals (so it is a module combination, usable away from mu).
    The defining property: <grad F, [v]>_{g,mu} = (lifted derivative of F
    along v)(mu) for every admissible v.
    """
    partials = F.partials()
    sharp_fields = [metric_gradient(phi, g) for phi in F.generators]
    coeffs = [Fi.value(mu) for Fi in partials]
    field = None
    for c, sf in zip(coeffs, sharp_fields):
        term = float(c) * sf
        field = term if field is None else field + term
    handle = Derivation.combination(partials, sharp_fields)
    return field, handle


def _require_energy_admissible(F: MeasureFunctional) -> None:
    if not F.psi_compact:
        raise DomainViolationError(
            "the quadratic energy needs a compactly supported outer function")


def dirichlet_form(F: MeasureFunctional, G: MeasureFunctional,
                   ensemble: "MeasureEnsemble", g: RiemannianMetric) -> float:
    """Expected inner product of metric gradients over the ensemble:
    sum_j p_j <grad F, grad G>_{g, mu_j}."""
    _require_energy_admissible(F)
    _require_energy_admissible(G)
    Fp = F.partials()
    Gp = G.partials()
    Fsharp = [metric_gradient(phi, g) for phi in F.generators]
    Gsharp = [metric_gradient(phi, g) for phi in G.generators]
    total = 0.0
    for mu, p in ensemble.pairs:
        fc = np.array([fi.value(mu) for fi in Fp])
        gc = np.array([gi.value(mu) for gi in Gp])
        inner = np.array([[tangent_inner_product(a, b, mu, g)
                           for b in Gsharp] for a in Fsharp])
        total += p * float(fc @ inner @ gc)
    return total


class MeasureEnsemble:
    """Finite ensemble of particle measures with probabilities."""

    def __init__(self, measures: Sequence[ParticleMeasure], probs):
        probs = np.asarray(probs, dtype=float)
        if len(measures) != probs.shape[0] or len(measures) == 0:
            raise InvalidArgumentError("one probability per measure is required")
        if np.any(probs < 0):
            raise DomainViolationError("probabilities must be nonnegative")
        if abs(probs.sum() - 1.0) > 1e-12:
            raise DomainViolationError("probabilities must sum to 1")
        self.pairs = [(m, float(p)) for m, p in zip(measures, probs)]


def markov_defect(F: MeasureFunctional, contraction: Profile,
                  ensemble: MeasureEnsemble, g: RiemannianMetric,
                  span: float = 10.0, samples: int = 2001) -> tuple[float, float]:
    """Energies (E(c∘F), E(F)) for a contraction c with c(0) = 0, |c'| <= 1.

    The contraction property of the energy says the first never exceeds the
    second.  The contraction contract is asserted by sampling c' on
    [-span, span]; violations raise DomainViolationError.
    """
    u = np.linspace(-span, span, samples)
    c0, c1 = contraction.derivs(u, 1)
    mid = samples // 2
    if abs(c0[mid]) > 1e-12:
        raise DomainViolationError("contraction must fix 0")
    if np.max(np.abs(c1)) > 1.0 + 1e-9:
        raise DomainViolationError("contraction slope must stay within [-1, 1]")
    if not contraction.zero_at_zero:
        raise DomainViolationError("contraction must vanish at 0")
    composed = MeasureFunctional(f_compose(contraction, F.psi), F.generators,
                                 label=f"c[{F.label}]")
    return (dirichlet_form(composed, composed, ensemble, g),
            dirichlet_form(F, F, ensemble, g))


# ---------------------------------------------------------------------------
# file format: one atom per line, "w x1 ... xm", '#' comments
# ---------------------------------------------------------------------------

def read_particle_measure(path_or_file) -> ParticleMeasure:
    close = False
    fh = path_or_file
    if isinstance(path_or_file, (str, bytes)):
        fh = open(path_or_file, "r")
        close = True
    try:
        rows = []
        dim = None
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            try:
                nums = [float(p) for p in parts]
            except ValueError as exc:
                raise InvalidArgumentError(
                    f"line {lineno}: not a number row: {line!r}") from exc
            if len(nums) < 2:
                raise InvalidArgumentError(
                    f"line {lineno}: need a weight and at least one coordinate")
            if dim is None:
                dim = len(nums) - 1
            elif len(nums) - 1 != dim:
                raise InvalidArgumentError(
                    f"line {lineno}: inconsistent dimension")
            if nums[0] <= 0:
                raise InvalidArgumentError(
                    f"line {lineno}: weight must be positive")
            rows.append(nums)
        if not rows:
            raise InvalidArgumentError("no atoms in input")
        arr = np.array(rows)
        return ParticleMeasure(arr[:, 1:], arr[:, 0])
    finally:
        if close:
            fh.close()


def write_particle_measure(mu: ParticleMeasure, path_or_file) -> None:
    fh = path_or_file
    close = False
    if isinstance(path_or_file, (str, bytes)):
        fh = open(path_or_file, "w")
        close = True
    try:
        fh.write(f"# particle measure: {mu.points.shape[0]} atoms in R^{mu.dim}\n")
        for w, x in zip(mu.weights, mu.points):
            coords = " ".join(repr(float(c)) for c in x)
            fh.write(f"{float(w)!r} {coords}\n")
    finally:
        if close:
            fh.close()
