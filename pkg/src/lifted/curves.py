"""Curves in R^k, tangent-bundle prolongation, and action functionals.

A curve carries batched position and velocity oracles on a compact
interval.  Action functionals F(C) = psi(∫ L_1(C, C'), ..., ∫ L_n(C, C'))
pair curves with Lagrangian densities — scalar fields on R^{2k} whose two
blocks are position and velocity.  The lifted derivative along an ambient
vector field v replaces each density by its derivative along the prolonged
field v†(x, y) = (v(x), Jv(x) y), keeping every oracle closed-form.

Integrals use composite Gauss-Legendre quadrature: 32 nodes per panel, one
panel per unit length, never fewer than two panels.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.interpolate import CubicSpline

from .cylinder import PairingFunctional
from .errors import InvalidArgumentError
from .fields import (PolynomialField, ScalarField, SqrtShiftProfile,
                     block_pullback, f_add, f_compose, f_mul, f_partial,
                     monomial)
from .smooth import VectorField, flow

__all__ = [
    "Curve",
    "line_curve",
    "circle_curve",
    "polynomial_curve",
    "spline_curve",
    "flowed_curve",
    "push_curve",
    "prolong",
    "kinetic_density",
    "smoothed_speed_density",
    "ActionFunctional",
    "action_lifted_derivative",
    "read_curve",
    "write_curve",
]


class Curve:
    """Smooth curve on [a, b]: batched position/velocity callables.

    ``exact`` marks analytic-grade velocity oracles; spline-reconstructed
    curves carry ``exact=False`` and their reports should say so.
    """

    def __init__(self, dim: int, a: float, b: float, position, velocity,
                 exact: bool = True, label: str = "curve"):
        if not (a < b):
            raise InvalidArgumentError("need a < b")
        self.dim = int(dim)
        self.a = float(a)
        self.b = float(b)
        self._position = position
        self._velocity = velocity
        self.exact = bool(exact)
        self.label = label

    def _check_s(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if s.ndim != 1:
            raise InvalidArgumentError("parameter values must be a 1-d array")
        return s

    def position(self, s) -> np.ndarray:
        s = self._check_s(s)
        out = np.asarray(self._position(s), dtype=float)
        return out.reshape(s.shape[0], self.dim)

    def velocity(self, s) -> np.ndarray:
        s = self._check_s(s)
        out = np.asarray(self._velocity(s), dtype=float)
        return out.reshape(s.shape[0], self.dim)

    def state(self, s) -> np.ndarray:
        """(position, velocity) stacked to (S, 2k)."""
        return np.concatenate([self.position(s), self.velocity(s)], axis=1)

    def __repr__(self):
        return (f"Curve({self.label!r}, dim={self.dim}, "
                f"[{self.a}, {self.b}], exact={self.exact})")


def line_curve(point, direction, a: float = 0.0, b: float = 1.0) -> Curve:
    """C(s) = point + s * direction."""
    p = np.asarray(point, dtype=float)
    d = np.asarray(direction, dtype=float)
    if p.shape != d.shape or p.ndim != 1:
        raise InvalidArgumentError("point and direction must be equal-length vectors")
    return Curve(p.shape[0], a, b,
                 lambda s: p[None, :] + s[:, None] * d[None, :],
                 lambda s: np.broadcast_to(d, (s.shape[0], d.shape[0])).copy(),
                 exact=True, label="line")


def circle_curve(radius: float = 1.0, center=(0.0, 0.0), a: float = 0.0,
                 b: float = 2.0 * math.pi) -> Curve:
    """C(s) = center + radius (cos s, sin s); unit speed when radius = 1."""
    c = np.asarray(center, dtype=float)
    if c.shape != (2,):
        raise InvalidArgumentError("circle curves live in the plane")
    r = float(radius)

    def pos(s):
        return c[None, :] + r * np.stack([np.cos(s), np.sin(s)], axis=1)

    def vel(s):
        return r * np.stack([-np.sin(s), np.cos(s)], axis=1)

    return Curve(2, a, b, pos, vel, exact=True, label="circle")


def polynomial_curve(coeffs, a: float = 0.0, b: float = 1.0) -> Curve:
    """C(s) = sum_j coeffs[j] s^j with coeffs of shape (deg+1, k)."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.ndim != 2 or coeffs.shape[0] < 1:
        raise InvalidArgumentError("coeffs must be a (deg+1, k) array")
    dcoef = coeffs[1:] * np.arange(1, coeffs.shape[0])[:, None] \
        if coeffs.shape[0] > 1 else np.zeros((1, coeffs.shape[1]))

    def horner(cf, s):
        out = np.zeros((s.shape[0], cf.shape[1]))
        for row in cf[::-1]:
            out = out * s[:, None] + row[None, :]
        return out

    return Curve(coeffs.shape[1], a, b,
                 lambda s: horner(coeffs, s), lambda s: horner(dcoef, s),
                 exact=True, label="polynomial")


def spline_curve(samples, a: float, b: float) -> Curve:
    """Cubic-spline reconstruction from uniform samples (N, k); the velocity
    comes from the spline derivative and is tagged lower-precision."""
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 2 or samples.shape[0] < 4:
        raise InvalidArgumentError("need at least 4 sample rows")
    grid = np.linspace(a, b, samples.shape[0])
    sp = CubicSpline(grid, samples, axis=0)
    dsp = sp.derivative()
    return Curve(samples.shape[1], a, b, lambda s: sp(s), lambda s: dsp(s),
                 exact=False, label="spline")


class _FlowedCurve(Curve):
    """Base curve transported by the time-t flow of v.

    Positions flow under v; velocities are transported by integrating the
    prolonged field on (position, velocity) pairs, never by differencing
    flowed positions.  The x-block of the prolonged field depends on x only,
    so the stacked integration reproduces the position flow exactly.
    """

    def __init__(self, v: VectorField, t: float, base: Curve):
        if v.dim != base.dim:
            raise InvalidArgumentError("field dimension mismatch")
        self.v = v
        self.t = float(t)
        self.base = base
        self._vdag = prolong(v)
        self._cache_key = None
        self._cache_val = None
        super().__init__(base.dim, base.a, base.b, self._pos, self._vel,
                         exact=base.exact, label=f"flow[{base.label}]")

    def _flowed_state(self, s: np.ndarray) -> np.ndarray:
        key = s.tobytes()
        if key != self._cache_key:
            state = flow(self._vdag, self.t, self.base.state(s))
            self._cache_key, self._cache_val = key, state
        return self._cache_val

    def _pos(self, s):
        return self._flowed_state(s)[:, :self.dim]

    def _vel(self, s):
        return self._flowed_state(s)[:, self.dim:]


def flowed_curve(v: VectorField, t: float, base: Curve) -> Curve:
    return _FlowedCurve(v, t, base)


def push_curve(v: VectorField, t: float, C: Curve) -> Curve:
    """Group action (theta, C) -> theta o C for theta the time-t flow."""
    return flowed_curve(v, t, C)


def prolong(v: VectorField) -> VectorField:
    """v†(x, y) = (v(x), Jv(x) y) on R^{2k}.

    Component oracles stay closed-form: the y-block entries are sums of
    (d_j v_i)(x) * y_j, so their Jacobian uses v's component Hessians.  Not
    compactly supported (linear in y), but complete whenever v is: x stays
    in v's flow and y solves a linear equation with bounded coefficients.
    """
    k = v.dim
    comps = []
    for i in range(k):
        comps.append(block_pullback(v.components[i], 2 * k, 0))
    for i in range(k):
        acc = None
        for j in range(k):
            pj = block_pullback(f_partial(v.components[i], j), 2 * k, 0)
            yj = monomial(2 * k, tuple(1 if t == k + j else 0
                                       for t in range(2 * k)))
            term = f_mul(pj, yj)
            acc = term if acc is None else f_add(acc, term)
        comps.append(acc)
    return VectorField(comps, complete=v.complete, support=None)


def kinetic_density(k: int) -> PolynomialField:
    """L(x, y) = |y|^2."""
    return PolynomialField(2 * k, {
        tuple(2 if t == k + j else 0 for t in range(2 * k)): 1.0
        for j in range(k)})


def smoothed_speed_density(k: int, delta: float = 1e-6) -> ScalarField:
    """L(x, y) = sqrt(|y|^2 + delta^2): the arc-length density smoothed at
    the origin so it stays a legal generator."""
    return f_compose(SqrtShiftProfile(float(delta)), kinetic_density(k))


def _interval_nodes(a: float, b: float, nodes_per_panel: int = 32,
                    min_panels: int = 2):
    """Composite Gauss-Legendre rule: one panel per unit length (at least
    min_panels), nodes_per_panel nodes each."""
    length = b - a
    panels = max(min_panels, int(math.ceil(length)))
    x, w = np.polynomial.legendre.leggauss(nodes_per_panel)
    edges = np.linspace(a, b, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1] - edges[0])
    nodes = (mid[:, None] + half * x[None, :]).reshape(-1)
    weights = np.tile(half * w, panels)
    return nodes, weights


class ActionFunctional(PairingFunctional):
    """F(C) = psi(∫_a^b L_1(C, C') ds, ..., ∫_a^b L_n(C, C') ds).

    Densities are scalar fields on R^{2k}; the lifted derivative extends
    them by d_{v†}L.
    """

    def __init__(self, psi: ScalarField, densities, label: str = "",
                 nodes_per_panel: int = 32):
        densities = list(densities)
        if not densities:
            raise InvalidArgumentError("at least one density is required")
        dims = {g.dim for g in densities}
        if len(dims) != 1:
            raise InvalidArgumentError("densities must share one dimension")
        d = dims.pop()
        if d % 2 != 0:
            raise InvalidArgumentError(
                "densities live on R^{2k}: position and velocity blocks")
        super().__init__(psi, densities, label=label)
        self.base_dim = d // 2
        self.nodes_per_panel = int(nodes_per_panel)

    def _clone(self, psi, generators, label):
        return type(self)(psi, generators, label=label,
                          nodes_per_panel=self.nodes_per_panel)

    def _pair(self, C: Curve) -> np.ndarray:
        if C.dim != self.base_dim:
            raise InvalidArgumentError("curve has the wrong ambient dimension")
        s, w = _interval_nodes(C.a, C.b, self.nodes_per_panel)
        Z = C.state(s)
        return np.array([float(w @ g._val(Z)) for g in self.generators])

    def _derive_generator(self, v: VectorField, L: ScalarField) -> ScalarField:
        from .smooth import directional_derivative
        return directional_derivative(prolong(v), L)


def action_lifted_derivative(v: VectorField, F: ActionFunctional) -> ActionFunctional:
    """d/dt at 0 of F(flow_t(v) o C), as a closed-form functional."""
    return F.derive(v)


# ---------------------------------------------------------------------------
# file format: header "k a b N", then N uniform sample rows "x1 ... xk"
# ---------------------------------------------------------------------------

def read_curve(path_or_file) -> Curve:
    """Read uniform samples and reconstruct by cubic spline (tagged)."""
    fh, close = path_or_file, False
    if isinstance(path_or_file, (str, bytes)):
        fh, close = open(path_or_file, "r"), True
    try:
        tokens: list[str] = []
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if line:
                tokens.append(line)
        if not tokens:
            raise InvalidArgumentError("empty curve file")
        head = tokens[0].split()
        if len(head) != 4:
            raise InvalidArgumentError("curve header must be 'k a b N'")
        try:
            k, n = int(head[0]), int(head[3])
            a, b = float(head[1]), float(head[2])
        except ValueError as exc:
            raise InvalidArgumentError("malformed curve header") from exc
        if k < 1 or n < 4 or not a < b:
            raise InvalidArgumentError("curve header out of range (need N >= 4, a < b)")
        if len(tokens) - 1 != n:
            raise InvalidArgumentError(
                f"expected {n} sample lines, found {len(tokens) - 1}")
        rows = []
        for idx, line in enumerate(tokens[1:], start=2):
            parts = line.split()
            if len(parts) != k:
                raise InvalidArgumentError(
                    f"line {idx}: expected {k} coordinates, found {len(parts)}")
            try:
                rows.append([float(p) for p in parts])
            except ValueError as exc:
                raise InvalidArgumentError(f"line {idx}: bad number") from exc
        return spline_curve(np.array(rows), a, b)
    finally:
        if close:
            fh.close()


def write_curve(C: Curve, path_or_file, n_samples: int = 129) -> None:
    if n_samples < 4:
        raise InvalidArgumentError("need at least 4 samples")
    fh, close = path_or_file, False
    if isinstance(path_or_file, (str, bytes)):
        fh, close = open(path_or_file, "w"), True
    try:
        s = np.linspace(C.a, C.b, n_samples)
        X = C.position(s)
        fh.write(f"{C.dim} {C.a!r} {C.b!r} {n_samples}\n")
        for row in X:
            fh.write(" ".join(repr(float(c)) for c in row) + "\n")
    finally:
        if close:
            fh.close()
