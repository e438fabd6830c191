"""Vector fields, flows, Lie brackets and Riemannian metrics on R^m.

A vector field is a tuple of scalar-field components, so its Jacobian rows
are the component gradients and its second derivatives are the component
Hessians.  That keeps every derived object (brackets, directional
derivatives, prolongations) inside the closed-form oracle discipline of
``lifted.fields``.

Flows integrate dx/dt = v(x) with a fixed-step classical Runge-Kutta
scheme: step count ceil(|t|/h) with h = min(1e-3, |t|), so flow(v, 0, x)
returns x exactly and results are reproducible bit-for-bit.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .errors import InvalidArgumentError, NumericFailureError, UnsupportedOperationError
from .fields import (Ball, PolynomialField, ScalarField, _as_batch, _tighter,
                     enclosing_ball, f_add, f_affine, f_mul,
                     f_partial, f_scale, linear_form, ExpProfile, f_compose)

__all__ = [
    "VectorField",
    "constant_field",
    "linear_field",
    "field_from_components",
    "scaled_bump_field",
    "lie_bracket",
    "flow",
    "directional_derivative",
    "RiemannianMetric",
    "ConstantMetric",
    "ConformalMetric",
    "euclidean_metric",
    "metric_gradient",
    "AffineEmbedding",
    "direct_sum_field",
]


class VectorField:
    """Vector field with componentwise closed-form oracles.

    ``complete`` marks fields whose flow exists for all time (compact
    support, or globally Lipschitz by construction); operations that lift
    derivatives only accept complete fields.
    """

    def __init__(self, components: Sequence[ScalarField],
                 complete: bool | None = None,
                 support: Ball | None = "auto"):
        if not components:
            raise InvalidArgumentError("vector field needs at least one component")
        dim = components[0].dim
        if any(c.dim != dim for c in components):
            raise InvalidArgumentError("component dimensions disagree")
        if len(components) != dim:
            raise InvalidArgumentError(
                "a vector field on R^m needs exactly m components")
        self.components = tuple(components)
        self.dim = dim
        if support == "auto":
            balls = [c.support for c in components]
            support = enclosing_ball([b for b in balls if b is not None]) \
                if all(b is not None for b in balls) else None
        self.support = support
        self.complete = bool(complete) if complete is not None else support is not None
        self.grad_exact = all(c.grad_exact for c in components)
        self.hess_exact = all(c.hess_exact for c in components)

    def eval(self, x):
        X, single = _as_batch(x, self.dim)
        out = np.stack([c._val(X) for c in self.components], axis=1)
        return out[0] if single else out

    __call__ = eval

    def jacobian(self, x):
        """J[k, j] = ∂v_k/∂x_j."""
        X, single = _as_batch(x, self.dim)
        out = np.stack([c._grad(X) for c in self.components], axis=1)
        return out[0] if single else out

    def component_hessians(self, x):
        X, single = _as_batch(x, self.dim)
        H = np.stack([c._hess(X) for c in self.components], axis=1)
        H = 0.5 * (H + np.swapaxes(H, 2, 3))
        return H[0] if single else H

    def __add__(self, other: "VectorField") -> "VectorField":
        if other.dim != self.dim:
            raise InvalidArgumentError("dimension mismatch")
        comps = [f_add(a, b) for a, b in zip(self.components, other.components)]
        return VectorField(comps, complete=self.complete and other.complete)

    def __rmul__(self, c: float) -> "VectorField":
        comps = [f_scale(float(c), a) for a in self.components]
        return VectorField(comps, complete=self.complete)

    __mul__ = __rmul__


def field_from_components(components: Sequence[ScalarField], complete=None) -> VectorField:
    return VectorField(components, complete=complete)


def constant_field(vec) -> VectorField:
    vec = np.asarray(vec, dtype=float)
    m = vec.shape[0]
    from .fields import constant
    return VectorField([constant(m, vec[k]) for k in range(m)], complete=True,
                       support=None)


def linear_field(A) -> VectorField:
    """v(x) = A x; globally Lipschitz, hence complete."""
    A = np.asarray(A, dtype=float)
    m = A.shape[0]
    if A.shape != (m, m):
        raise InvalidArgumentError("matrix must be square")
    return VectorField([linear_form(A[k]) for k in range(m)], complete=True,
                       support=None)


def scaled_bump_field(center, radius: float, coefficients) -> VectorField:
    """Compactly supported field b(x) * (polynomial components).

    ``coefficients[k]`` is the terms dict of the k-th polynomial component.
    """
    from .fields import BumpField
    b = BumpField(center, radius)
    m = b.dim
    comps = []
    for k in range(m):
        p = PolynomialField(m, coefficients[k])
        comps.append(f_mul(b, p))
    return VectorField(comps, complete=True)


def directional_derivative(v: VectorField, phi: ScalarField) -> ScalarField:
    """d_v phi = <v, grad phi> with oracles composed by the chain rule.

    Value needs grad(phi); gradient needs hess(phi) and the Jacobian of v;
    Hessian needs third(phi) and the component Hessians of v, else it falls
    back to tagged finite differences.  Support is a bound for the
    intersection of the two supports.
    """
    if v.dim != phi.dim:
        raise InvalidArgumentError("field dimensions disagree")
    return _DirectionalDerivativeField(v, phi)


class _DirectionalDerivativeField(ScalarField):
    def __init__(self, v: VectorField, phi: ScalarField):
        exact_h = phi.has_third and v.hess_exact
        super().__init__(phi.dim, support=_tighter(v.support, phi.support),
                         grad_exact=phi.hess_exact and v.grad_exact,
                         hess_exact=exact_h, has_third=False)
        self.v, self.phi = v, phi

    def _val(self, X):
        V = np.stack([c._val(X) for c in self.v.components], axis=1)
        return np.einsum("nk,nk->n", V, self.phi._grad(X))

    def _grad(self, X):
        V = np.stack([c._val(X) for c in self.v.components], axis=1)
        J = np.stack([c._grad(X) for c in self.v.components], axis=1)
        return np.einsum("nkj,nk->nj", J, self.phi._grad(X)) \
            + np.einsum("nkj,nk->nj", self.phi._hess(X), V)

    def _hess(self, X):
        if not (self.phi.has_third and self.v.hess_exact):
            return super()._hess(X)  # FD from the exact gradient
        V = np.stack([c._val(X) for c in self.v.components], axis=1)
        J = np.stack([c._grad(X) for c in self.v.components], axis=1)
        VH = np.stack([c._hess(X) for c in self.v.components], axis=1)
        G = self.phi._grad(X)
        H = self.phi._hess(X)
        T = self.phi._third(X)
        out = np.einsum("nkjl,nk->njl", VH, G)
        cross = np.einsum("nkj,nkl->njl", J, H)
        out += cross + np.swapaxes(cross, 1, 2)
        out += np.einsum("nkjl,nk->njl", T, V)
        return out


def lie_bracket(v: VectorField, w: VectorField) -> VectorField:
    """[v, w] with components d_v(w_k) - d_w(v_k).

    The Jacobian oracle is exact whenever both fields carry component
    Hessians; support is bounded by either field's ball since the bracket
    vanishes wherever one of the fields vanishes identically.
    """
    if v.dim != w.dim:
        raise InvalidArgumentError("field dimensions disagree")
    comps = [f_add(directional_derivative(v, wk),
                   f_scale(-1.0, directional_derivative(w, vk)))
             for vk, wk in zip(v.components, w.components)]
    comps = [c._replace_support(_tighter(v.support, w.support)) for c in comps]
    return VectorField(comps, complete=v.complete and w.complete,
                       support=_tighter(v.support, w.support))


def flow(v: VectorField, t: float, x, h: float | None = None):
    """Point (or batch) transported by the time-t flow of v.

    Classical fixed-step RK4: steps = ceil(|t|/h), h = min(1e-3, |t|) unless
    overridden.  flow(v, 0, x) returns x unchanged.
    """
    if not v.complete:
        raise UnsupportedOperationError("flow requires a complete vector field")
    X, single = _as_batch(x, v.dim)
    t = float(t)
    if t == 0.0:
        out = X.copy()
        return out[0] if single else out
    step = min(1e-3, abs(t)) if h is None else float(h)
    steps = max(1, math.ceil(abs(t) / step))
    dt = t / steps
    Y = X.copy()
    for _ in range(steps):
        k1 = v.eval(Y)
        k2 = v.eval(Y + 0.5 * dt * k1)
        k3 = v.eval(Y + 0.5 * dt * k2)
        k4 = v.eval(Y + dt * k3)
        Y = Y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    if not np.all(np.isfinite(Y)):
        raise NumericFailureError("flow integration produced non-finite points")
    return Y[0] if single else Y


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------

class RiemannianMetric:
    """Field of SPD matrices g(x) with an exact inverse and a sharp operator
    turning scalar-field differentials into vector fields."""

    dim: int

    def matrix(self, x):
        raise NotImplementedError

    def inverse(self, x):
        raise NotImplementedError

    def inner(self, x, u, w):
        """<u, w>_g at x; batched over leading axes of x/u/w."""
        G = self.matrix(x)
        u = np.asarray(u, dtype=float)
        w = np.asarray(w, dtype=float)
        if G.ndim == 2:
            return float(u @ G @ w)
        return np.einsum("ni,nij,nj->n", u, G, w)

    def sharp(self, phi: ScalarField) -> VectorField:
        """g^{-1} grad(phi) as a vector field with composed oracles."""
        raise NotImplementedError


class ConstantMetric(RiemannianMetric):
    def __init__(self, G):
        G = np.asarray(G, dtype=float)
        if G.ndim != 2 or G.shape[0] != G.shape[1]:
            raise InvalidArgumentError("metric matrix must be square")
        if not np.allclose(G, G.T, atol=1e-12):
            raise InvalidArgumentError("metric matrix must be symmetric")
        eig = np.linalg.eigvalsh(G)
        if eig.min() <= 0:
            raise NumericFailureError("metric matrix must be positive definite")
        self.G = 0.5 * (G + G.T)
        self.Ginv = np.linalg.inv(self.G)
        self.dim = G.shape[0]

    def matrix(self, x):
        X, single = _as_batch(x, self.dim)
        out = np.broadcast_to(self.G, (X.shape[0],) + self.G.shape)
        return out[0] if single else out

    def inverse(self, x):
        X, single = _as_batch(x, self.dim)
        out = np.broadcast_to(self.Ginv, (X.shape[0],) + self.G.shape)
        return out[0] if single else out

    def sharp(self, phi: ScalarField) -> VectorField:
        comps = []
        for k in range(self.dim):
            parts = [f_scale(self.Ginv[k, j], f_partial(phi, j))
                     for j in range(self.dim) if self.Ginv[k, j] != 0.0]
            comps.append(f_add(*parts) if parts else
                         PolynomialField(self.dim, {}))
        return VectorField(comps, complete=phi.support is not None,
                           support=phi.support)


class ConformalMetric(RiemannianMetric):
    """g(x) = exp(2 lambda(x)) * I with scalar field lambda; the inverse is
    exp(-2 lambda) * I in closed form."""

    def __init__(self, lam: ScalarField):
        self.lam = lam
        self.dim = lam.dim

    def _factor(self, x, sign):
        X, single = _as_batch(x, self.dim)
        f = np.exp(sign * 2.0 * self.lam._val(X))
        return f[0] if single else f

    def matrix(self, x):
        X, single = _as_batch(x, self.dim)
        f = np.exp(2.0 * self.lam._val(X))
        out = f[:, None, None] * np.eye(self.dim)[None]
        return out[0] if single else out

    def inverse(self, x):
        X, single = _as_batch(x, self.dim)
        f = np.exp(-2.0 * self.lam._val(X))
        out = f[:, None, None] * np.eye(self.dim)[None]
        return out[0] if single else out

    def sharp(self, phi: ScalarField) -> VectorField:
        factor = f_compose(ExpProfile(), f_scale(-2.0, self.lam))
        comps = [f_mul(factor, f_partial(phi, k)) for k in range(self.dim)]
        comps = [c._replace_support(phi.support) for c in comps]
        return VectorField(comps, complete=phi.support is not None,
                           support=phi.support)


def euclidean_metric(dim: int) -> ConstantMetric:
    return ConstantMetric(np.eye(dim))


def metric_gradient(phi: ScalarField, g: RiemannianMetric) -> VectorField:
    """grad_g phi = g^{-1} grad phi, satisfying <grad_g phi, w>_g = d_w phi."""
    if phi.dim != g.dim:
        raise InvalidArgumentError("field and metric dimensions disagree")
    return g.sharp(phi)


class AffineEmbedding:
    """Proper embedding x' -> Q x' + b of R^{m'} into R^m, Q with orthonormal
    columns.  Carries a left inverse on the image, exact pullback of scalar
    fields, and an extension rule for vector fields that restricts to the
    transported field on the image (masked by a radial bump in the normal
    coordinate so the extension stays compactly supported)."""

    def __init__(self, Q, b=None):
        Q = np.asarray(Q, dtype=float)
        if Q.ndim != 2 or Q.shape[0] < Q.shape[1]:
            raise InvalidArgumentError("need an (m, m') matrix with m >= m'")
        if not np.allclose(Q.T @ Q, np.eye(Q.shape[1]), atol=1e-12):
            raise InvalidArgumentError("columns must be orthonormal")
        self.Q = Q
        self.b = np.zeros(Q.shape[0]) if b is None else np.asarray(b, dtype=float)
        self.ambient_dim, self.dim = Q.shape

    def apply(self, x):
        X = np.asarray(x, dtype=float)
        return X @ self.Q.T + self.b

    def left_inverse(self, x):
        X = np.asarray(x, dtype=float)
        return (X - self.b) @ self.Q

    def pullback_scalar(self, phi: ScalarField) -> ScalarField:
        if phi.dim != self.ambient_dim:
            raise InvalidArgumentError("field must live on the ambient space")
        return f_affine(phi, self.Q, self.b)

    def extend_field(self, v: VectorField, normal_radius: float = 2.0) -> VectorField:
        """Ambient field equal to Q v(Q^T(x-b)) on the image, cut off at
        normal distance ``normal_radius``."""
        if v.dim != self.dim:
            raise InvalidArgumentError("field must live on the embedded space")
        m, mp = self.ambient_dim, self.dim
        P = np.eye(m) - self.Q @ self.Q.T  # projector on the normal space
        # u(x) = |P (x - b)|^2 / rho^2 as an exact polynomial
        quad = {}
        for i in range(m):
            for j in range(m):
                if P[i, j] != 0.0:
                    e = [0] * m
                    e[i] += 1
                    e[j] += 1
                    e = tuple(e)
                    quad[e] = quad.get(e, 0.0) + P[i, j] / normal_radius ** 2
        u = PolynomialField(m, quad).p_affine(np.eye(m), -self.b)
        from .fields import BumpProfile
        mask = f_compose(BumpProfile(), u)
        pulled = [f_affine(c, self.Q.T, -self.Q.T @ self.b) for c in v.components]
        comps = []
        for k in range(m):
            parts = [f_scale(self.Q[k, j], pulled[j]) for j in range(mp)
                     if self.Q[k, j] != 0.0]
            base = f_add(*parts) if parts else PolynomialField(m, {})
            comps.append(f_mul(mask, base))
        supp = None
        if v.support is not None:
            c = self.apply(v.support.center)
            supp = Ball(c, math.hypot(v.support.radius, normal_radius))
        comps = [f._replace_support(supp) for f in comps]
        return VectorField(comps, complete=True, support=supp)


def direct_sum_field(v: VectorField, copies: int) -> VectorField:
    """v^(+n) on R^{m n}: block b moves by v(x_b).  Complete iff v is; not
    compactly supported for n >= 2 (support is declared None)."""
    if copies < 1:
        raise InvalidArgumentError("copies must be >= 1")
    m, n = v.dim, copies
    comps = []
    for blk in range(n):
        A = np.zeros((m, m * n))
        A[:, blk * m:(blk + 1) * m] = np.eye(m)
        for k in range(m):
            comps.append(f_affine(v.components[k], A))
    supp = v.support if copies == 1 else None
    return VectorField(comps, complete=v.complete, support=supp)
