"""Differential forms on R^m with scalar-field coefficients.

A degree-k form is stored on the basis of strictly increasing multi-indices:
omega = sum_I c_I(x) dx_I.  Exterior derivative, interior product and the
Lie derivative along a vector field (via the homotopy formula) all stay in
this representation; when the coefficients and the field are polynomial the
results stay polynomial, which the simplicial integration layer exploits
for exact integrals.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np

from .errors import InvalidArgumentError
from .fields import PolynomialField, ScalarField, _as_batch, constant, f_add, f_mul, f_partial, f_scale
from .smooth import VectorField

__all__ = [
    "DifferentialForm",
    "form_from_coeffs",
    "coordinate_form",
    "exterior_derivative",
    "interior_product",
    "lie_derivative_form",
    "wedge_ambient",
]


class DifferentialForm:
    """sum_I c_I dx_I with I strictly increasing, c_I scalar fields on R^m."""

    def __init__(self, dim: int, degree: int,
                 coeffs: Mapping[tuple, ScalarField]):
        if not 0 <= degree <= dim:
            raise InvalidArgumentError("form degree must lie in [0, dim]")
        self.dim = int(dim)
        self.degree = int(degree)
        clean = {}
        for I, c in coeffs.items():
            I = tuple(int(i) for i in I)
            if len(I) != degree or list(I) != sorted(set(I)):
                raise InvalidArgumentError(
                    f"multi-index {I} is not strictly increasing of length {degree}")
            if any(not 0 <= i < dim for i in I):
                raise InvalidArgumentError(f"multi-index {I} out of range")
            if c.dim != dim:
                raise InvalidArgumentError("coefficient dimension mismatch")
            clean[I] = c
        self.coeffs = clean

    @property
    def is_polynomial(self) -> bool:
        return all(isinstance(c, PolynomialField) for c in self.coeffs.values())

    def coefficient(self, I) -> ScalarField:
        I = tuple(int(i) for i in I)
        return self.coeffs.get(I, constant(self.dim, 0.0))

    def eval(self, x, vectors):
        """omega_x(u_1, ..., u_k): x is (m,) or (N, m); vectors is a sequence
        of k arrays broadcastable with x."""
        X, single = _as_batch(x, self.dim)
        k = self.degree
        if len(vectors) != k:
            raise InvalidArgumentError(f"expected {k} argument vectors")
        if k == 0:
            out = sum(c._val(X) for c in self.coeffs.values()) \
                if self.coeffs else np.zeros(X.shape[0])
            return float(out[0]) if single else out
        U = [np.broadcast_to(np.asarray(u, dtype=float), X.shape).reshape(X.shape)
             for u in vectors]
        out = np.zeros(X.shape[0])
        for I, c in self.coeffs.items():
            M = np.empty((X.shape[0], k, k))
            for a in range(k):
                for b, idx in enumerate(I):
                    M[:, a, b] = U[a][:, idx]
            out += c._val(X) * np.linalg.det(M)
        return float(out[0]) if single else out

    def map_coeffs(self, fn) -> "DifferentialForm":
        return DifferentialForm(self.dim, self.degree,
                                {I: fn(c) for I, c in self.coeffs.items()})

    def __add__(self, other: "DifferentialForm") -> "DifferentialForm":
        if (self.dim, self.degree) != (other.dim, other.degree):
            raise InvalidArgumentError("can only add forms of equal dim/degree")
        out = dict(self.coeffs)
        for I, c in other.coeffs.items():
            out[I] = f_add(out[I], c) if I in out else c
        return DifferentialForm(self.dim, self.degree, out)

    def scale(self, s: float) -> "DifferentialForm":
        return self.map_coeffs(lambda c: f_scale(s, c))

    def __sub__(self, other):
        return self + other.scale(-1.0)


def form_from_coeffs(dim: int, degree: int, coeffs) -> DifferentialForm:
    return DifferentialForm(dim, degree, coeffs)


def coordinate_form(dim: int, I, coeff: ScalarField | float = 1.0) -> DifferentialForm:
    """coeff * dx_I for a strictly increasing multi-index I."""
    I = tuple(int(i) for i in I)
    c = coeff if isinstance(coeff, ScalarField) else constant(dim, float(coeff))
    return DifferentialForm(dim, len(I), {I: c})


def _insert_index(j: int, I: tuple) -> tuple[int, tuple] | None:
    """Position sign and sorted index for dx_j ^ dx_I; None if j in I."""
    if j in I:
        return None
    out = sorted(I + (j,))
    pos = out.index(j)
    return (-1) ** pos, tuple(out)


def exterior_derivative(omega: DifferentialForm) -> DifferentialForm:
    """d omega; requires degree < dim so the result stays representable."""
    if omega.degree >= omega.dim:
        raise InvalidArgumentError(
            "exterior derivative of a top-degree form is not representable; "
            "degree must be < dim")
    out: dict = {}
    for I, c in omega.coeffs.items():
        for j in range(omega.dim):
            ins = _insert_index(j, I)
            if ins is None:
                continue
            sign, J = ins
            term = f_scale(sign, f_partial(c, j))
            out[J] = f_add(out[J], term) if J in out else term
    return DifferentialForm(omega.dim, omega.degree + 1, out)


def interior_product(v: VectorField, omega: DifferentialForm) -> DifferentialForm:
    """i_v omega, contraction in the first slot."""
    if v.dim != omega.dim:
        raise InvalidArgumentError("dimension mismatch")
    if omega.degree == 0:
        return DifferentialForm(omega.dim, 0, {})
    out: dict = {}
    for I, c in omega.coeffs.items():
        for a, idx in enumerate(I):
            J = I[:a] + I[a + 1:]
            term = f_scale((-1.0) ** a, f_mul(c, v.components[idx]))
            out[J] = f_add(out[J], term) if J in out else term
    return DifferentialForm(omega.dim, omega.degree - 1, out)


def lie_derivative_form(v: VectorField, omega: DifferentialForm) -> DifferentialForm:
    """d_v omega via the homotopy formula i_v d + d i_v.

    For top-degree forms d omega vanishes identically, so only the second
    term contributes.
    """
    if omega.degree < omega.dim:
        first = interior_product(v, exterior_derivative(omega))
    else:
        first = DifferentialForm(omega.dim, omega.degree, {})
    if omega.degree >= 1:
        second = exterior_derivative(interior_product(v, omega))
    else:
        second = DifferentialForm(omega.dim, 0, {})
    return first + second


def wedge_ambient(a: DifferentialForm, b: DifferentialForm) -> DifferentialForm:
    """a ^ b on coefficients, with shuffle signs."""
    if a.dim != b.dim:
        raise InvalidArgumentError("dimension mismatch")
    if a.degree + b.degree > a.dim:
        raise InvalidArgumentError("wedge degree exceeds ambient dimension")
    out: dict = {}
    for I, c in a.coeffs.items():
        for J, d in b.coeffs.items():
            if set(I) & set(J):
                continue
            K = tuple(sorted(I + J))
            # sign of the permutation sorting (I, J) into K
            perm = list(I + J)
            sign = 1
            for i in range(len(perm)):
                for j in range(i + 1, len(perm)):
                    if perm[i] > perm[j]:
                        sign = -sign
            term = f_scale(sign, f_mul(c, d))
            out[K] = f_add(out[K], term) if K in out else term
    return DifferentialForm(a.dim, a.degree + b.degree, out)
