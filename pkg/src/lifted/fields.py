"""Scalar fields on R^m with closed-form derivative oracles.

Everything downstream (vector fields, differential forms, functionals on
measures / mappings / submanifolds / curves) consumes fields through the
four-method contract ``eval / grad / hess / third``.  Library primitives
(polynomials, radial bumps, profile compositions) implement the oracles in
closed form; combinators propagate them by the chain rule, so a derived
field is exact to whatever order its ingredients allow.  Fields built from
bare callables fall back to central finite differences (step 1e-5) and are
tagged ``grad_exact=False`` so callers can widen tolerances.

Evaluation is batched: every method accepts a single point of shape (m,)
or a batch of shape (N, m) and returns correspondingly shaped arrays.
Fields are immutable after construction.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .errors import InvalidArgumentError, UnsupportedOperationError

FD_STEP = 1e-5

__all__ = [
    "Ball",
    "ScalarField",
    "PolynomialField",
    "BumpField",
    "UserScalarField",
    "Profile",
    "TanhProfile",
    "LinearProfile",
    "SinProfile",
    "ExpProfile",
    "SqrtShiftProfile",
    "BumpProfile",
    "constant",
    "coordinate",
    "linear_form",
    "monomial",
    "bump",
    "f_add",
    "f_scale",
    "f_mul",
    "f_partial",
    "f_affine",
    "f_compose",
    "f_shift",
    "xi_from_psi",
    "psi_partial",
]


class Ball:
    """Closed ball ``|x - center| <= radius`` used as a support bound."""

    __slots__ = ("center", "radius")

    def __init__(self, center, radius: float):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        if self.radius <= 0:
            raise InvalidArgumentError("support radius must be positive")

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    def contains(self, x) -> np.ndarray:
        X = np.atleast_2d(np.asarray(x, dtype=float))
        return np.linalg.norm(X - self.center, axis=1) <= self.radius

    def __repr__(self):
        return f"Ball(center={self.center.tolist()}, radius={self.radius})"


def enclosing_ball(balls: Sequence[Ball]) -> Ball:
    """A ball containing every ball in the list (not minimal, just sound)."""
    centers = np.array([b.center for b in balls])
    mid = centers.mean(axis=0)
    r = max(np.linalg.norm(b.center - mid) + b.radius for b in balls)
    return Ball(mid, r)


def _tighter(a: Ball | None, b: Ball | None) -> Ball | None:
    """Sound bound for an intersection: either ball contains it; pick the smaller."""
    if a is None:
        return b
    if b is None:
        return a
    return a if a.radius <= b.radius else b


def _as_batch(x, dim: int):
    X = np.asarray(x, dtype=float)
    if X.ndim == 1:
        if X.shape[0] != dim:
            raise InvalidArgumentError(f"expected point of dim {dim}, got shape {X.shape}")
        return X[None, :], True
    if X.ndim == 2 and X.shape[1] == dim:
        return X, False
    raise InvalidArgumentError(f"expected (m,) or (N,{dim}) array, got shape {X.shape}")


class ScalarField:
    """Base class.  Subclasses implement ``_val`` and usually ``_grad``/``_hess``.

    ``grad_exact`` / ``hess_exact`` report whether the corresponding oracle is
    closed-form; ``has_third`` reports availability of third derivatives.
    """

    def __init__(self, dim: int, support: Ball | None = None,
                 grad_exact: bool = True, hess_exact: bool = True,
                 has_third: bool = False):
        self.dim = int(dim)
        self.support = support
        self.grad_exact = grad_exact
        self.hess_exact = hess_exact
        self.has_third = has_third

    # -- subclass surface -------------------------------------------------
    def _val(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _grad(self, X: np.ndarray) -> np.ndarray:
        # central FD fallback from values
        h = FD_STEP
        out = np.empty_like(X)
        for j in range(self.dim):
            e = np.zeros(self.dim)
            e[j] = h
            out[:, j] = (self._val(X + e) - self._val(X - e)) / (2 * h)
        return out

    def _hess(self, X: np.ndarray) -> np.ndarray:
        h = FD_STEP
        n, m = X.shape
        out = np.empty((n, m, m))
        for j in range(m):
            e = np.zeros(m)
            e[j] = h
            out[:, :, j] = (self._grad(X + e) - self._grad(X - e)) / (2 * h)
        return out

    def _third(self, X: np.ndarray) -> np.ndarray:
        raise UnsupportedOperationError(
            f"{type(self).__name__} carries no third-derivative oracle")

    # -- public, batch-aware ----------------------------------------------
    def eval(self, x):
        X, single = _as_batch(x, self.dim)
        v = self._val(X)
        return float(v[0]) if single else v

    __call__ = eval

    def grad(self, x):
        X, single = _as_batch(x, self.dim)
        g = self._grad(X)
        return g[0] if single else g

    def hess(self, x):
        X, single = _as_batch(x, self.dim)
        H = self._hess(X)
        H = 0.5 * (H + np.swapaxes(H, 1, 2))  # symmetric by contract
        return H[0] if single else H

    def third(self, x):
        if not self.has_third:
            raise UnsupportedOperationError(
                f"{type(self).__name__} carries no third-derivative oracle")
        X, single = _as_batch(x, self.dim)
        T = self._third(X)
        T = _symmetrize3(T)
        return T[0] if single else T

    def _replace_support(self, ball: Ball | None) -> "ScalarField":
        """Shallow copy with a caller-supplied (sound) support bound."""
        import copy
        f = copy.copy(self)
        f.support = ball
        return f

    # -- sugar ---------------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, ScalarField):
            return f_add(self, other)
        return f_add(self, constant(self.dim, float(other)))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, ScalarField):
            return f_add(self, f_scale(-1.0, other))
        return self + (-float(other))

    def __neg__(self):
        return f_scale(-1.0, self)

    def __mul__(self, other):
        if isinstance(other, ScalarField):
            return f_mul(self, other)
        return f_scale(float(other), self)

    __rmul__ = __mul__


def _symmetrize3(T: np.ndarray) -> np.ndarray:
    return (T + np.transpose(T, (0, 1, 3, 2)) + np.transpose(T, (0, 2, 1, 3))
            + np.transpose(T, (0, 2, 3, 1)) + np.transpose(T, (0, 3, 1, 2))
            + np.transpose(T, (0, 3, 2, 1))) / 6.0


# ---------------------------------------------------------------------------
# polynomial fields (closed under the whole combinator set)
# ---------------------------------------------------------------------------

class PolynomialField(ScalarField):
    """Multivariate polynomial, terms as {exponent tuple: coefficient}.

    All derivative orders are closed-form; the algebraic operations below
    keep polynomials polynomial, which downstream code uses to route
    integrals through exact paths.
    """

    def __init__(self, dim: int, terms: dict):
        super().__init__(dim, support=None, grad_exact=True, hess_exact=True,
                         has_third=True)
        clean = {}
        for exps, c in terms.items():
            if len(exps) != dim:
                raise InvalidArgumentError("exponent tuple length must equal dim")
            c = float(c)
            if c != 0.0:
                clean[tuple(int(e) for e in exps)] = clean.get(tuple(exps), 0.0) + c
        self.terms = {e: c for e, c in clean.items() if c != 0.0}

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def _val(self, X):
        out = np.zeros(X.shape[0])
        for exps, c in self.terms.items():
            out += c * _mono(X, exps)
        return out

    def _grad(self, X):
        n, m = X.shape
        out = np.zeros((n, m))
        for exps, c in self.terms.items():
            for j, e in enumerate(exps):
                if e:
                    out[:, j] += c * e * _mono(X, _lower(exps, j))
        return out

    def _hess(self, X):
        n, m = X.shape
        out = np.zeros((n, m, m))
        for exps, c in self.terms.items():
            for j, e in enumerate(exps):
                if not e:
                    continue
                d1 = _lower(exps, j)
                for k, e2 in enumerate(d1):
                    if e2:
                        out[:, j, k] += c * e * e2 * _mono(X, _lower(d1, k))
        return out

    def _third(self, X):
        n, m = X.shape
        out = np.zeros((n, m, m, m))
        for exps, c in self.terms.items():
            for i, e in enumerate(exps):
                if not e:
                    continue
                d1 = _lower(exps, i)
                for j, e2 in enumerate(d1):
                    if not e2:
                        continue
                    d2 = _lower(d1, j)
                    for k, e3 in enumerate(d2):
                        if e3:
                            out[:, i, j, k] += c * e * e2 * e3 * _mono(X, _lower(d2, k))
        return out

    # polynomial algebra -----------------------------------------------------
    def p_add(self, other: "PolynomialField") -> "PolynomialField":
        if other.dim != self.dim:
            raise InvalidArgumentError(
                f"cannot add polynomials on R^{self.dim} and R^{other.dim}")
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, 0.0) + c
        return PolynomialField(self.dim, t)

    def p_scale(self, c: float) -> "PolynomialField":
        return PolynomialField(self.dim, {e: c * v for e, v in self.terms.items()})

    def p_mul(self, other: "PolynomialField") -> "PolynomialField":
        if other.dim != self.dim:
            raise InvalidArgumentError(
                f"cannot multiply polynomials on R^{self.dim} and R^{other.dim}")
        t = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0.0) + c1 * c2
        return PolynomialField(self.dim, t)

    def p_partial(self, j: int) -> "PolynomialField":
        t = {}
        for exps, c in self.terms.items():
            if exps[j]:
                e = _lower(exps, j)
                t[e] = t.get(e, 0.0) + c * exps[j]
        return PolynomialField(self.dim, t)

    def p_affine(self, A: np.ndarray, b: np.ndarray) -> "PolynomialField":
        """Exact expansion of x -> self(A x + b); A is (p, new_dim)."""
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float)
        p, new_dim = A.shape
        if p != self.dim:
            raise InvalidArgumentError("affine map output dim must match field dim")
        one = {(0,) * new_dim: 1.0}
        # linear polynomials for each substituted variable
        subs = []
        for i in range(p):
            t = {(0,) * new_dim: float(b[i])}
            for j in range(new_dim):
                if A[i, j] != 0.0:
                    e = tuple(1 if k == j else 0 for k in range(new_dim))
                    t[e] = float(A[i, j])
            subs.append(t)
        total: dict = {}
        for exps, c in self.terms.items():
            term = dict(one)
            for i, e in enumerate(exps):
                for _ in range(e):
                    term = _dict_mul(term, subs[i])
            for e2, c2 in term.items():
                total[e2] = total.get(e2, 0.0) + c * c2
        return PolynomialField(new_dim, total)

    def p_embed(self, new_dim: int, offset: int) -> "PolynomialField":
        """View as a polynomial on R^new_dim acting on coordinates
        [offset, offset+dim)."""
        t = {}
        for exps, c in self.terms.items():
            e = [0] * new_dim
            e[offset:offset + self.dim] = exps
            t[tuple(e)] = c
        return PolynomialField(new_dim, t)


def _mono(X, exps):
    out = np.ones(X.shape[0])
    for j, e in enumerate(exps):
        if e:
            out = out * X[:, j] ** e
    return out


def _lower(exps, j):
    return tuple(e - 1 if k == j else e for k, e in enumerate(exps))


def _dict_mul(t1: dict, t2: dict) -> dict:
    out: dict = {}
    for e1, c1 in t1.items():
        for e2, c2 in t2.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, 0.0) + c1 * c2
    return out


def constant(dim: int, value: float) -> PolynomialField:
    return PolynomialField(dim, {(0,) * dim: float(value)})


def coordinate(dim: int, j: int) -> PolynomialField:
    if not 0 <= j < dim:
        raise InvalidArgumentError("coordinate index out of range")
    return PolynomialField(dim, {tuple(1 if k == j else 0 for k in range(dim)): 1.0})


def linear_form(w, b: float = 0.0) -> PolynomialField:
    w = np.asarray(w, dtype=float)
    dim = w.shape[0]
    terms = {(0,) * dim: float(b)}
    for j in range(dim):
        if w[j] != 0.0:
            terms[tuple(1 if k == j else 0 for k in range(dim))] = float(w[j])
    return PolynomialField(dim, terms)


def monomial(dim: int, exps, coeff: float = 1.0) -> PolynomialField:
    return PolynomialField(dim, {tuple(exps): float(coeff)})


# ---------------------------------------------------------------------------
# radial bump
# ---------------------------------------------------------------------------

_BUMP_CUT = 1.0 - 1e-8  # beyond this the value underflows to 0 anyway


class BumpField(ScalarField):
    """b(x) = exp(1 - 1/(1 - r^2)) with r = |x - center|/radius inside the
    support ball, 0 outside.  b(center) = 1.  All oracles closed-form."""

    def __init__(self, center, radius: float):
        center = np.asarray(center, dtype=float)
        if radius <= 0:
            raise InvalidArgumentError("bump radius must be positive")
        super().__init__(center.shape[0], support=Ball(center, radius),
                         grad_exact=True, hess_exact=True, has_third=True)
        self.center = center
        self.radius = float(radius)

    def _parts(self, X, order: int):
        d = X - self.center
        u = np.einsum("ni,ni->n", d, d) / self.radius ** 2
        inside = u < _BUMP_CUT
        w = np.where(inside, 1.0 / np.where(inside, 1.0 - u, 1.0), 0.0)
        b = np.where(inside, np.exp(np.where(inside, 1.0 - w, 0.0)), 0.0)
        out = [b]
        if order >= 1:
            h1 = -w * w
            out.append(b * h1)
            if order >= 2:
                h2 = -2.0 * w ** 3
                out.append(b * (h1 * h1 + h2))
                if order >= 3:
                    h3 = -6.0 * w ** 4
                    out.append(b * (h1 ** 3 + 3.0 * h1 * h2 + h3))
        return d, out

    def _val(self, X):
        _, (b,) = self._parts(X, 0)
        return b

    def _grad(self, X):
        d, (_, b1) = self._parts(X, 1)
        return (2.0 / self.radius ** 2) * b1[:, None] * d

    def _hess(self, X):
        d, (_, b1, b2) = self._parts(X, 2)
        c = 2.0 / self.radius ** 2
        eye = np.eye(self.dim)
        return (c * c) * b2[:, None, None] * d[:, :, None] * d[:, None, :] \
            + c * b1[:, None, None] * eye[None, :, :]

    def _third(self, X):
        d, (_, b1, b2, b3) = self._parts(X, 3)
        c = 2.0 / self.radius ** 2
        ddd = d[:, :, None, None] * d[:, None, :, None] * d[:, None, None, :]
        eye = np.eye(self.dim)
        sym = (eye[None, :, :, None] * d[:, None, None, :]
               + eye[None, :, None, :] * d[:, None, :, None]
               + eye[None, None, :, :] * d[:, :, None, None])
        return (c ** 3) * b3[:, None, None, None] * ddd \
            + (c * c) * b2[:, None, None, None] * sym


def bump(center, radius: float) -> BumpField:
    return BumpField(center, radius)


# ---------------------------------------------------------------------------
# 1-D profiles for composition
# ---------------------------------------------------------------------------

class Profile:
    """Scalar function of one variable with derivatives up to order 3.

    ``zero_at_zero`` marks profiles with p(0) = 0; composition uses it to
    propagate compact support.
    """

    zero_at_zero = False

    def derivs(self, u: np.ndarray, order: int) -> list[np.ndarray]:
        raise NotImplementedError


class TanhProfile(Profile):
    zero_at_zero = True

    def derivs(self, u, order):
        t = np.tanh(u)
        out = [t]
        if order >= 1:
            s = 1.0 - t * t
            out.append(s)
            if order >= 2:
                out.append(-2.0 * t * s)
                if order >= 3:
                    out.append(-2.0 * s * (1.0 - 3.0 * t * t))
        return out


class SinProfile(Profile):
    zero_at_zero = True

    def __init__(self, freq: float = 1.0):
        self.freq = float(freq)

    def derivs(self, u, order):
        a = self.freq
        out = [np.sin(a * u)]
        if order >= 1:
            out.append(a * np.cos(a * u))
            if order >= 2:
                out.append(-a * a * np.sin(a * u))
                if order >= 3:
                    out.append(-a ** 3 * np.cos(a * u))
        return out


class ExpProfile(Profile):
    def derivs(self, u, order):
        e = np.exp(u)
        return [e] * (order + 1)


class LinearProfile(Profile):
    """p(u) = slope * u; the unit-slope case is the do-nothing contraction."""

    zero_at_zero = True

    def __init__(self, slope: float = 1.0):
        self.slope = float(slope)

    def derivs(self, u, order):
        u = np.asarray(u, dtype=float)
        out = [self.slope * u]
        if order >= 1:
            out.append(np.full_like(u, self.slope))
            for _ in range(2, order + 1):
                out.append(np.zeros_like(u))
        return out


class SqrtShiftProfile(Profile):
    """u -> sqrt(u + eps^2); smooth surrogate for sqrt on u >= 0."""

    def __init__(self, eps: float):
        if eps <= 0:
            raise InvalidArgumentError("eps must be positive")
        self.eps = float(eps)

    def derivs(self, u, order):
        f = np.sqrt(u + self.eps ** 2)
        out = [f]
        if order >= 1:
            out.append(0.5 / f)
            if order >= 2:
                out.append(-0.25 / f ** 3)
                if order >= 3:
                    out.append(0.375 / f ** 5)
        return out


class BumpProfile(Profile):
    """u -> exp(1 - 1/(1-u)) on [0, 1), 0 beyond; value 1 at u = 0."""

    def derivs(self, u, order):
        inside = u < _BUMP_CUT
        w = np.where(inside, 1.0 / np.where(inside, 1.0 - u, 1.0), 0.0)
        g = np.where(inside, np.exp(np.where(inside, 1.0 - w, 0.0)), 0.0)
        out = [g]
        if order >= 1:
            h1 = -w * w
            out.append(g * h1)
            if order >= 2:
                h2 = -2.0 * w ** 3
                out.append(g * (h1 * h1 + h2))
                if order >= 3:
                    h3 = -6.0 * w ** 4
                    out.append(g * (h1 ** 3 + 3 * h1 * h2 + h3))
        return out


# ---------------------------------------------------------------------------
# combinators
# ---------------------------------------------------------------------------

class LinearCombinationField(ScalarField):
    def __init__(self, fields: Sequence[ScalarField], coeffs: Sequence[float]):
        if not fields:
            raise InvalidArgumentError("empty combination")
        dim = fields[0].dim
        if any(f.dim != dim for f in fields):
            raise InvalidArgumentError("mixed dimensions in combination")
        balls = [f.support for f in fields]
        supp = enclosing_ball(balls) if all(b is not None for b in balls) else None
        super().__init__(
            dim, support=supp,
            grad_exact=all(f.grad_exact for f in fields),
            hess_exact=all(f.hess_exact for f in fields),
            has_third=all(f.has_third for f in fields))
        self.fields = tuple(fields)
        self.coeffs = tuple(float(c) for c in coeffs)

    def _val(self, X):
        return sum(c * f._val(X) for f, c in zip(self.fields, self.coeffs))

    def _grad(self, X):
        return sum(c * f._grad(X) for f, c in zip(self.fields, self.coeffs))

    def _hess(self, X):
        return sum(c * f._hess(X) for f, c in zip(self.fields, self.coeffs))

    def _third(self, X):
        return sum(c * f._third(X) for f, c in zip(self.fields, self.coeffs))


class ProductField(ScalarField):
    def __init__(self, f: ScalarField, g: ScalarField):
        if f.dim != g.dim:
            raise InvalidArgumentError("product factors must share a dimension")
        supp = _tighter(f.support, g.support)
        super().__init__(
            f.dim, support=supp,
            grad_exact=f.grad_exact and g.grad_exact,
            hess_exact=f.hess_exact and g.hess_exact,
            has_third=f.has_third and g.has_third)
        self.f, self.g = f, g

    def _val(self, X):
        return self.f._val(X) * self.g._val(X)

    def _grad(self, X):
        return (self.f._val(X)[:, None] * self.g._grad(X)
                + self.g._val(X)[:, None] * self.f._grad(X))

    def _hess(self, X):
        fv, gv = self.f._val(X), self.g._val(X)
        fg, gg = self.f._grad(X), self.g._grad(X)
        fh, gh = self.f._hess(X), self.g._hess(X)
        cross = fg[:, :, None] * gg[:, None, :]
        return fv[:, None, None] * gh + gv[:, None, None] * fh \
            + cross + np.swapaxes(cross, 1, 2)

    def _third(self, X):
        fv, gv = self.f._val(X), self.g._val(X)
        fg, gg = self.f._grad(X), self.g._grad(X)
        fh, gh = self.f._hess(X), self.g._hess(X)
        ft, gt = self.f._third(X), self.g._third(X)
        out = fv[:, None, None, None] * gt + gv[:, None, None, None] * ft
        for h, v in ((fh, gg), (gh, fg)):
            out += h[:, :, :, None] * v[:, None, None, :]
            out += h[:, :, None, :] * v[:, None, :, None]
            out += h[:, None, :, :] * v[:, :, None, None]
        return out


class AffinePullbackField(ScalarField):
    """x -> f(A x + b) for f on R^p, A of shape (p, dim), b of shape (p,)."""

    def __init__(self, f: ScalarField, A, b=None):
        A = np.asarray(A, dtype=float)
        p, dim = A.shape
        if p != f.dim:
            raise InvalidArgumentError("map output dim must equal field dim")
        b = np.zeros(p) if b is None else np.asarray(b, dtype=float)
        supp = None
        if f.support is not None:
            smin = np.linalg.svd(A, compute_uv=False).min() if min(A.shape) else 0.0
            if smin > 1e-12:
                x0 = np.linalg.lstsq(A, f.support.center - b, rcond=None)[0]
                supp = Ball(x0, f.support.radius / smin)
        super().__init__(dim, support=supp, grad_exact=f.grad_exact,
                         hess_exact=f.hess_exact, has_third=f.has_third)
        self.f, self.A, self.b = f, A, b

    def _inner(self, X):
        return X @ self.A.T + self.b

    def _val(self, X):
        return self.f._val(self._inner(X))

    def _grad(self, X):
        return self.f._grad(self._inner(X)) @ self.A

    def _hess(self, X):
        H = self.f._hess(self._inner(X))
        return np.einsum("nab,ai,bj->nij", H, self.A, self.A)

    def _third(self, X):
        T = self.f._third(self._inner(X))
        return np.einsum("nabc,ai,bj,ck->nijk", T, self.A, self.A, self.A)


class PartialField(ScalarField):
    """j-th partial derivative of a field, with oracles shifted one order."""

    def __init__(self, f: ScalarField, j: int):
        if not 0 <= j < f.dim:
            raise InvalidArgumentError("partial index out of range")
        super().__init__(f.dim, support=f.support,
                         grad_exact=f.hess_exact, hess_exact=f.has_third,
                         has_third=False)
        self.f, self.j = f, j

    def _val(self, X):
        return self.f._grad(X)[:, self.j]

    def _grad(self, X):
        return self.f._hess(X)[:, self.j, :]

    def _hess(self, X):
        if self.f.has_third:
            return self.f._third(X)[:, self.j, :, :]
        return super()._hess(X)  # FD fallback from grad


class ComposeProfileField(ScalarField):
    """profile(inner(x)) with chain-rule oracles."""

    def __init__(self, profile: Profile, inner: ScalarField):
        supp = inner.support if profile.zero_at_zero else None
        super().__init__(inner.dim, support=supp,
                         grad_exact=inner.grad_exact,
                         hess_exact=inner.hess_exact,
                         has_third=inner.has_third)
        self.profile, self.inner = profile, inner

    def _val(self, X):
        return self.profile.derivs(self.inner._val(X), 0)[0]

    def _grad(self, X):
        _, p1 = self.profile.derivs(self.inner._val(X), 1)
        return p1[:, None] * self.inner._grad(X)

    def _hess(self, X):
        _, p1, p2 = self.profile.derivs(self.inner._val(X), 2)
        G = self.inner._grad(X)
        return p2[:, None, None] * G[:, :, None] * G[:, None, :] \
            + p1[:, None, None] * self.inner._hess(X)

    def _third(self, X):
        _, p1, p2, p3 = self.profile.derivs(self.inner._val(X), 3)
        G = self.inner._grad(X)
        H = self.inner._hess(X)
        out = p3[:, None, None, None] * (G[:, :, None, None] * G[:, None, :, None]
                                         * G[:, None, None, :])
        out += p2[:, None, None, None] * (H[:, :, :, None] * G[:, None, None, :]
                                          + H[:, :, None, :] * G[:, None, :, None]
                                          + H[:, None, :, :] * G[:, :, None, None])
        out += p1[:, None, None, None] * self.inner._third(X)
        return out


class UserScalarField(ScalarField):
    """Field from bare callables; missing oracles fall back to FD (step 1e-5)."""

    def __init__(self, dim: int, fn: Callable, grad: Callable | None = None,
                 hess: Callable | None = None, support: Ball | None = None):
        super().__init__(dim, support=support,
                         grad_exact=grad is not None,
                         hess_exact=hess is not None, has_third=False)
        self._fn, self._gfn, self._hfn = fn, grad, hess

    def _apply_rows(self, fn, X, shape):
        out = np.empty((X.shape[0],) + shape)
        for i, row in enumerate(X):
            out[i] = fn(row)
        return out

    def _val(self, X):
        return self._apply_rows(self._fn, X, ())

    def _grad(self, X):
        if self._gfn is None:
            return super()._grad(X)
        return self._apply_rows(self._gfn, X, (self.dim,))

    def _hess(self, X):
        if self._hfn is None:
            return super()._hess(X)
        return self._apply_rows(self._hfn, X, (self.dim, self.dim))


# ---------------------------------------------------------------------------
# smart constructors: keep polynomials closed, flatten combinations
# ---------------------------------------------------------------------------

def f_add(*fields: ScalarField) -> ScalarField:
    if all(isinstance(f, PolynomialField) for f in fields):
        out = fields[0]
        for f in fields[1:]:
            out = out.p_add(f)
        return out
    return LinearCombinationField(fields, [1.0] * len(fields))


def f_scale(c: float, f: ScalarField) -> ScalarField:
    if isinstance(f, PolynomialField):
        return f.p_scale(c)
    return LinearCombinationField([f], [c])


def f_mul(f: ScalarField, g: ScalarField) -> ScalarField:
    if isinstance(f, PolynomialField) and isinstance(g, PolynomialField):
        return f.p_mul(g)
    return ProductField(f, g)


def f_partial(f: ScalarField, j: int) -> ScalarField:
    if isinstance(f, PolynomialField):
        return f.p_partial(j)
    return PartialField(f, j)


def f_affine(f: ScalarField, A, b=None) -> ScalarField:
    A = np.asarray(A, dtype=float)
    if isinstance(f, PolynomialField):
        return f.p_affine(A, np.zeros(A.shape[0]) if b is None else np.asarray(b, float))
    return AffinePullbackField(f, A, b)


def f_compose(profile: Profile, inner: ScalarField) -> ScalarField:
    return ComposeProfileField(profile, inner)


def f_shift(f: ScalarField, a) -> ScalarField:
    """x -> f(x + a); support ball translated accordingly."""
    a = np.asarray(a, dtype=float)
    out = f_affine(f, np.eye(f.dim), a)
    if f.support is not None and not isinstance(out, PolynomialField):
        out = out._replace_support(Ball(f.support.center - a, f.support.radius))
    return out


def block_pullback(f: ScalarField, total_dim: int, offset: int) -> ScalarField:
    """View f (on R^p) as a field on R^total_dim reading coordinates
    [offset, offset+p)."""
    if isinstance(f, PolynomialField):
        return f.p_embed(total_dim, offset)
    A = np.zeros((f.dim, total_dim))
    A[:, offset:offset + f.dim] = np.eye(f.dim)
    return AffinePullbackField(f, A)


# ---------------------------------------------------------------------------
# the chain-rule outer functions for lifted derivatives
# ---------------------------------------------------------------------------

def psi_partial(psi: ScalarField, i: int) -> ScalarField:
    """∂psi/∂r_i as a field on the same R^n."""
    return f_partial(psi, i)


class XiField(ScalarField):
    """xi(r, s) = sum_i s_i * ∂psi/∂r_i(r) on R^{2n}.

    This is the outer function of the derivative of psi(pairings): when the
    generator list doubles to (originals, derived), composing with xi gives
    the derived functional in the same functional form.
    """

    def __init__(self, psi: ScalarField):
        n = psi.dim
        super().__init__(2 * n, support=None,
                         grad_exact=psi.hess_exact,
                         hess_exact=psi.has_third,
                         has_third=False)
        self.psi, self.n = psi, n

    def _split(self, X):
        return X[:, :self.n], X[:, self.n:]

    def _val(self, X):
        R, S = self._split(X)
        return np.einsum("ni,ni->n", S, self.psi._grad(R))

    def _grad(self, X):
        R, S = self._split(X)
        H = self.psi._hess(R)
        return np.concatenate([np.einsum("nij,ni->nj", H, S),
                               self.psi._grad(R)], axis=1)

    def _hess(self, X):
        if not self.psi.has_third:
            return super()._hess(X)
        R, S = self._split(X)
        n, N = self.n, X.shape[0]
        T = self.psi._third(R)
        H = self.psi._hess(R)
        out = np.zeros((N, 2 * n, 2 * n))
        out[:, :n, :n] = np.einsum("nijk,ni->njk", T, S)
        out[:, :n, n:] = H
        out[:, n:, :n] = H
        return out


def xi_from_psi(psi: ScalarField) -> ScalarField:
    """Outer function for the lifted derivative; polynomial psi stays polynomial."""
    if isinstance(psi, PolynomialField):
        n = psi.dim
        out = constant(2 * n, 0.0)
        for i in range(n):
            dpsi = psi.p_partial(i).p_embed(2 * n, 0)
            out = out.p_add(dpsi.p_mul(coordinate(2 * n, n + i)))
        return out
    return XiField(psi)


# convenience used throughout tests and demos
def gaussian_like_bump(dim: int) -> BumpField:
    return BumpField(np.zeros(dim), 1.0)
