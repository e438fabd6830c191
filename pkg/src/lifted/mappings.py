"""Functionals of mappings from a finite labeled set into R^m.

A mapping point P assigns a point of R^m to each of N labels; measures on
the label set are named nonnegative weight vectors.  Functionals take the
form F(P) = sum over label tuples of mu_1(i_1)...mu_n(i_n) *
phi(P(i_1), ..., P(i_n)) for a smooth phi on R^{m n}.  The group of flows
acts by moving every value, and the lifted derivative replaces phi by its
derivative along the n-fold direct sum of the field, leaving the measure
list untouched.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import DomainViolationError, InvalidArgumentError
from .fields import (Ball, ScalarField, block_pullback, f_add, f_affine,
                     f_mul, f_scale)
from .smooth import VectorField, direct_sum_field, directional_derivative, flow

__all__ = [
    "LabeledSpace",
    "MappingPoint",
    "MappingFunctional",
    "product_generator",
    "push_mapping",
    "mapping_lifted_derivative",
    "precompose",
    "mapping_embedding_rewrite",
    "read_mapping_point",
    "write_mapping_point",
]


class LabeledSpace:
    """Finite measurable space: N labels and a family of named measures."""

    def __init__(self, size: int, measures: dict):
        if size < 1:
            raise InvalidArgumentError("need at least one label")
        self.size = int(size)
        self.measures = {}
        for name, w in measures.items():
            w = np.asarray(w, dtype=float)
            if w.shape != (self.size,):
                raise InvalidArgumentError(
                    f"measure {name!r} must have one weight per label")
            if np.any(w < 0):
                raise DomainViolationError(
                    f"measure {name!r} has a negative weight")
            self.measures[str(name)] = w

    def measure(self, name: str) -> np.ndarray:
        if name not in self.measures:
            raise InvalidArgumentError(f"unknown measure {name!r}")
        return self.measures[name]

    def find(self, w: np.ndarray, tol: float = 1e-12) -> str | None:
        for name, vec in self.measures.items():
            if np.max(np.abs(vec - w)) <= tol:
                return name
        return None


class MappingPoint:
    """P: labels -> R^m, stored as an (N, m) array of values."""

    def __init__(self, values):
        values = np.asarray(values, dtype=float)
        if values.ndim != 2:
            raise InvalidArgumentError("values must be an (N, m) array")
        self.values = values

    @property
    def size(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def compose_labels(self, idx) -> "MappingPoint":
        """P o pi for a label map pi given as an index array into our rows."""
        idx = np.asarray(idx, dtype=int)
        return MappingPoint(self.values[idx])


def push_mapping(v: VectorField, t: float, P: MappingPoint) -> MappingPoint:
    """Mapping transported by the time-t flow of v (values move)."""
    return MappingPoint(flow(v, t, P.values))


class MappingFunctional:
    """F(P) = sum_{i_1..i_n} mu_1(i_1)...mu_n(i_n) phi(P(i_1),...,P(i_n))."""

    def __init__(self, phi: ScalarField, measures: Sequence[np.ndarray],
                 base_dim: int, label: str = ""):
        measures = [np.asarray(m, dtype=float) for m in measures]
        if not measures:
            raise InvalidArgumentError("at least one measure factor is required")
        sizes = {m.shape[0] for m in measures}
        if len(sizes) != 1 or any(m.ndim != 1 for m in measures):
            raise InvalidArgumentError("measures must be weight vectors of one size")
        if any(np.any(m < 0) for m in measures):
            raise DomainViolationError("measure weights must be nonnegative")
        n = len(measures)
        if phi.dim != base_dim * n:
            raise InvalidArgumentError(
                f"phi must live on R^({base_dim}*{n}) = R^{base_dim * n}")
        self.phi = phi
        self.measures = measures
        self.base_dim = int(base_dim)
        self.arity = n
        self.label = label or "mapping-functional"

    def _tuples(self, P: MappingPoint):
        n, N = self.arity, P.size
        grids = np.meshgrid(*[np.arange(N)] * n, indexing="ij")
        idx = np.stack([g.reshape(-1) for g in grids], axis=1)  # (N^n, n)
        pts = P.values[idx].reshape(idx.shape[0], n * P.dim)
        w = np.ones(idx.shape[0])
        for k, mu in enumerate(self.measures):
            w = w * mu[idx[:, k]]
        return pts, w

    def value(self, P: MappingPoint) -> float:
        if P.dim != self.base_dim:
            raise InvalidArgumentError("mapping has the wrong target dimension")
        if P.size != self.measures[0].shape[0]:
            raise InvalidArgumentError("mapping has the wrong label count")
        pts, w = self._tuples(P)
        return float(w @ self.phi._val(pts))

    def derive(self, v: VectorField) -> "MappingFunctional":
        if v.dim != self.base_dim:
            raise InvalidArgumentError("field dimension mismatch")
        if not v.complete:
            raise InvalidArgumentError(
                "lifted derivatives require a complete vector field")
        vn = direct_sum_field(v, self.arity)
        dphi = directional_derivative(vn, self.phi)
        if dphi.support is None and self.phi.support is not None:
            dphi = dphi._replace_support(self.phi.support)
        return MappingFunctional(dphi, self.measures, self.base_dim,
                                 label=f"D[{self.label}]")

    def add(self, other: "MappingFunctional") -> "MappingFunctional":
        """Pointwise sum as a single functional over the concatenated
        measure factors.  Each block is scaled by the inverse total mass of
        the other block's factors, which cancels the extra sums the padding
        introduces; a zero-mass summand is identically zero and drops out."""
        self._combinable(other)
        mass_self = float(np.prod([mu.sum() for mu in self.measures]))
        mass_other = float(np.prod([mu.sum() for mu in other.measures]))
        if mass_other == 0.0:
            return MappingFunctional(self.phi, self.measures, self.base_dim,
                                     label=f"({self.label}+{other.label})")
        if mass_self == 0.0:
            return MappingFunctional(other.phi, other.measures, other.base_dim,
                                     label=f"({self.label}+{other.label})")
        n, n2 = self.arity, other.arity
        m = self.base_dim
        total = m * (n + n2)
        phi = f_add(block_pullback(f_scale(1.0 / mass_other, self.phi), total, 0),
                    block_pullback(f_scale(1.0 / mass_self, other.phi), total, m * n))
        return MappingFunctional(phi, list(self.measures) + list(other.measures),
                                 m, label=f"({self.label}+{other.label})")

    def mul(self, other: "MappingFunctional") -> "MappingFunctional":
        self._combinable(other)
        n, n2 = self.arity, other.arity
        m = self.base_dim
        total = m * (n + n2)
        phi = f_mul(block_pullback(self.phi, total, 0),
                    block_pullback(other.phi, total, m * n))
        if phi.support is None and self.phi.support is not None \
                and other.phi.support is not None:
            c = np.concatenate([self.phi.support.center, other.phi.support.center])
            r = float(np.hypot(self.phi.support.radius, other.phi.support.radius))
            phi = phi._replace_support(Ball(c, r))
        return MappingFunctional(phi, list(self.measures) + list(other.measures),
                                 m, label=f"({self.label}*{other.label})")

    def scale(self, c: float) -> "MappingFunctional":
        return MappingFunctional(f_scale(float(c), self.phi), self.measures,
                                 self.base_dim, label=f"{c}*{self.label}")

    def _combinable(self, other) -> None:
        if not isinstance(other, MappingFunctional):
            raise InvalidArgumentError("can only combine mapping functionals")
        if other.base_dim != self.base_dim:
            raise InvalidArgumentError("target dimensions disagree")
        if other.measures[0].shape[0] != self.measures[0].shape[0]:
            raise InvalidArgumentError("label counts disagree")

    def __add__(self, other):
        return self.add(other)

    def __mul__(self, other):
        if isinstance(other, MappingFunctional):
            return self.mul(other)
        return self.scale(float(other))

    __rmul__ = __mul__


def product_generator(factors: Sequence[ScalarField]) -> ScalarField:
    """phi(x_1,...,x_n) = prod_k f_k(x_k) with the exact stacked support ball."""
    if not factors:
        raise InvalidArgumentError("need at least one factor")
    m = factors[0].dim
    if any(f.dim != m for f in factors):
        raise InvalidArgumentError("factors must share one dimension")
    total = m * len(factors)
    out = None
    for k, f in enumerate(factors):
        part = block_pullback(f, total, k * m)
        out = part if out is None else f_mul(out, part)
    if all(f.support is not None for f in factors):
        center = np.concatenate([f.support.center for f in factors])
        radius = float(np.sqrt(sum(f.support.radius ** 2 for f in factors)))
        out = out._replace_support(Ball(center, radius))
    return out


def mapping_lifted_derivative(v: VectorField, F: MappingFunctional) -> MappingFunctional:
    """d/dt at 0 of F(flow_t(v) o P), in closed form."""
    return F.derive(v)


def precompose(pi, source: LabeledSpace, target: LabeledSpace,
               F: MappingFunctional) -> MappingFunctional:
    """Rewrite F o (P' -> P' o pi) as a functional of P' over the target
    labels: every measure factor is pushed forward along pi.

    pi maps source labels to target labels (index array of length
    source.size).  Every pushforward must be a member of the target family.
    """
    pi = np.asarray(pi, dtype=int)
    if pi.shape != (source.size,):
        raise InvalidArgumentError("pi must assign a target label to every source label")
    if np.any(pi < 0) or np.any(pi >= target.size):
        raise InvalidArgumentError("pi maps outside the target label set")
    pushed = []
    for mu in F.measures:
        out = np.zeros(target.size)
        np.add.at(out, pi, mu)
        if target.find(out) is None:
            raise DomainViolationError(
                "pushforward measure is not in the target family")
        pushed.append(out)
    return MappingFunctional(F.phi, pushed, F.base_dim,
                             label=f"precomp[{F.label}]")


def mapping_embedding_rewrite(emb, F: MappingFunctional) -> MappingFunctional:
    """The functional P' -> F(embedding o P') over mappings into the
    embedded space: phi is pulled back along the blockwise embedding."""
    n, m = F.arity, F.base_dim
    if emb.ambient_dim != m:
        raise InvalidArgumentError("embedding must land in the functional's space")
    mp = emb.dim
    A = np.zeros((m * n, mp * n))
    b = np.zeros(m * n)
    for k in range(n):
        A[k * m:(k + 1) * m, k * mp:(k + 1) * mp] = emb.Q
        b[k * m:(k + 1) * m] = emb.b
    phi = f_affine(F.phi, A, b)
    return MappingFunctional(phi, F.measures, mp, label=f"emb[{F.label}]")


# ---------------------------------------------------------------------------
# file format: one value per line, "x1 ... xm"
# ---------------------------------------------------------------------------

def read_mapping_point(path_or_file) -> MappingPoint:
    fh, close = path_or_file, False
    if isinstance(path_or_file, (str, bytes)):
        fh, close = open(path_or_file, "r"), True
    try:
        rows, dim = [], None
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                nums = [float(p) for p in line.split()]
            except ValueError as exc:
                raise InvalidArgumentError(
                    f"line {lineno}: not a number row: {line!r}") from exc
            if dim is None:
                dim = len(nums)
            elif len(nums) != dim:
                raise InvalidArgumentError(f"line {lineno}: inconsistent dimension")
            rows.append(nums)
        if not rows:
            raise InvalidArgumentError("no values in input")
        return MappingPoint(np.array(rows))
    finally:
        if close:
            fh.close()


def write_mapping_point(P: MappingPoint, path_or_file) -> None:
    fh, close = path_or_file, False
    if isinstance(path_or_file, (str, bytes)):
        fh, close = open(path_or_file, "w"), True
    try:
        fh.write(f"# mapping point: {P.size} labels into R^{P.dim}\n")
        for row in P.values:
            fh.write(" ".join(repr(float(c)) for c in row) + "\n")
    finally:
        if close:
            fh.close()
