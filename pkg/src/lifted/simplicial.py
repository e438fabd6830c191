"""Oriented simplicial submanifolds of R^m and functionals of integrals.

A k-dimensional piecewise-linear submanifold is a vertex array plus
ordered (k+1)-tuples of vertex indices; the listed order carries the
orientation (an explicit per-cell sign array covers the 0-dimensional
case, where order cannot).  Functionals pair a mesh with degree-k forms
by integration: F(E) = psi(∫_E omega_1, ..., ∫_E omega_n).

Integration walks two routes and tests compare them: polynomial
coefficients integrate exactly through the Dirichlet moment formula on the
reference simplex, everything else through Duffy-collapsed Gauss-Legendre
quadrature (7 points per axis).  The boundary operator returns the
unshared faces with their induced orientations, chosen so the discrete
Stokes identity holds with the + sign.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Sequence

import numpy as np

from .cylinder import PairingFunctional
from .errors import InvalidArgumentError, InvalidMeshError
from .fields import ScalarField
from .forms import DifferentialForm, exterior_derivative, lie_derivative_form
from .smooth import VectorField, flow

__all__ = [
    "SimplicialManifold",
    "boundary",
    "refine",
    "deform",
    "integrate_form",
    "integrate_form_with_estimate",
    "SubmanifoldFunctional",
    "boundary_rewrite",
    "stokes_check",
    "boundary_weak_diff_check",
    "segment_mesh",
    "loop_mesh",
    "triangle_mesh",
    "square_mesh",
    "disk_mesh",
    "sphere_mesh",
    "circle_line_integral",
    "disk_convergence_study",
    "read_mesh",
    "write_mesh",
]


class SimplicialManifold:
    """Oriented PL submanifold: vertices (V, m), cells (C, k+1), signs (C,)."""

    def __init__(self, dim: int, vertices, cells, signs=None, validate: bool = True):
        vertices = np.asarray(vertices, dtype=float)
        cells = np.asarray(cells, dtype=int)
        if vertices.ndim != 2:
            raise InvalidMeshError("vertices must be a (V, m) array")
        if cells.size == 0:
            cells = cells.reshape(0, dim + 1)
        if cells.ndim != 2 or cells.shape[1] != dim + 1:
            raise InvalidMeshError(f"cells must be (C, {dim + 1}) for dim {dim}")
        self.dim = int(dim)
        self.vertices = vertices
        self.cells = cells
        if signs is None:
            signs = np.ones(cells.shape[0])
        self.signs = np.asarray(signs, dtype=float)
        if self.signs.shape != (cells.shape[0],):
            raise InvalidMeshError("signs must be a (C,) array, one per cell")
        if cells.shape[0] and not np.all(np.abs(self.signs) == 1.0):
            raise InvalidMeshError("signs must be +1/-1")
        self._has_boundary = None
        if validate:
            self.validate()

    @property
    def ambient_dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def n_cells(self) -> int:
        return self.cells.shape[0]

    @property
    def is_empty(self) -> bool:
        return self.n_cells == 0

    @property
    def has_boundary(self) -> bool:
        """True when some (k-1)-face belongs to exactly one cell."""
        if self.dim == 0 or self.is_empty:
            return False
        if self._has_boundary is None:
            incid = _face_incidences(self)
            self._has_boundary = any(len(v) == 1 for v in incid.values())
        return self._has_boundary

    def cell_edges(self) -> np.ndarray:
        """Per-cell edge matrices (C, k, m): rows p_i - p_0."""
        P = self.vertices[self.cells]  # (C, k+1, m)
        return P[:, 1:, :] - P[:, :1, :]

    def validate(self) -> None:
        if self.n_cells == 0:
            return
        if self.cells.min(initial=0) < 0 or \
                self.cells.max(initial=0) >= self.vertices.shape[0]:
            raise InvalidMeshError("cell index out of range")
        for cell in self.cells:
            if len(set(cell.tolist())) != len(cell):
                raise InvalidMeshError(f"degenerate cell {cell.tolist()}")
        if self.dim == 0:
            return
        incid = _face_incidences(self)
        for face, entries in incid.items():
            if len(entries) > 2:
                raise InvalidMeshError(
                    f"face {face} shared by {len(entries)} cells (non-manifold)")
            if len(entries) == 2 and entries[0][1] == entries[1][1]:
                raise InvalidMeshError(
                    f"face {face} has matching induced orientations "
                    "(inconsistent cell orientations)")

    def __repr__(self):
        return (f"SimplicialManifold(dim={self.dim}, "
                f"{self.vertices.shape[0]} vertices, {self.n_cells} cells "
                f"in R^{self.ambient_dim})")


def _perm_parity(seq) -> int:
    """Sign of the permutation sorting seq."""
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def _face_incidences(E: SimplicialManifold) -> dict:
    """face (sorted tuple) -> list of (ordered facet, total induced sign)."""
    out: dict = {}
    for cell, s in zip(E.cells, E.signs):
        cell = cell.tolist()
        for i in range(len(cell)):
            facet = tuple(cell[:i] + cell[i + 1:])
            sign = s * (-1.0) ** i * _perm_parity(facet)
            out.setdefault(tuple(sorted(facet)), []).append((facet, sign))
    return out


def boundary(E: SimplicialManifold) -> SimplicialManifold:
    """Unshared faces with induced orientation (facet order from the parent
    cell; sign (-1)^i folded into the order, or kept in the sign array when
    the faces are points)."""
    if E.dim == 0:
        raise InvalidArgumentError("0-dimensional manifolds have no boundary")
    incid = _face_incidences(E)
    cells, signs = [], []
    for face, entries in incid.items():
        if len(entries) != 1:
            continue
        facet, total = entries[0]
        parity = _perm_parity(facet)
        sign = total / parity  # orientation sign relative to the listed order
        facet = list(facet)
        if sign < 0 and len(facet) >= 2:
            facet[0], facet[1] = facet[1], facet[0]
            sign = 1.0
        cells.append(facet)
        signs.append(sign)
    if not cells:
        return SimplicialManifold(E.dim - 1, E.vertices,
                                  np.zeros((0, E.dim), dtype=int), validate=False)
    return SimplicialManifold(E.dim - 1, E.vertices, np.array(cells, dtype=int),
                              np.array(signs), validate=False)


def refine(E: SimplicialManifold) -> SimplicialManifold:
    """Halve edges: segments split in two, triangles into four (orientation
    preserved).  Only dims 1 and 2 are supported."""
    if E.dim == 1:
        verts = [E.vertices]
        nv = E.vertices.shape[0]
        cells, signs = [], []
        mids = 0.5 * (E.vertices[E.cells[:, 0]] + E.vertices[E.cells[:, 1]])
        verts.append(mids)
        for idx, (cell, s) in enumerate(zip(E.cells, E.signs)):
            mid = nv + idx
            cells += [[cell[0], mid], [mid, cell[1]]]
            signs += [s, s]
        return SimplicialManifold(1, np.vstack(verts), np.array(cells, dtype=int),
                                  np.array(signs), validate=False)
    if E.dim == 2:
        verts = list(E.vertices)
        edge_mid: dict = {}

        def midpoint(a: int, b: int) -> int:
            key = (min(a, b), max(a, b))
            if key not in edge_mid:
                verts.append(0.5 * (E.vertices[a] + E.vertices[b]))
                edge_mid[key] = len(verts) - 1
            return edge_mid[key]

        cells, signs = [], []
        for cell, s in zip(E.cells, E.signs):
            a, b, c = cell.tolist()
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            cells += [[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]
            signs += [s, s, s, s]
        return SimplicialManifold(2, np.array(verts), np.array(cells, dtype=int),
                                  np.array(signs), validate=False)
    raise InvalidArgumentError("refinement is implemented for dims 1 and 2")


def deform(v: VectorField, t: float, E: SimplicialManifold) -> SimplicialManifold:
    """Flow every vertex for time t; connectivity and orientation data stay."""
    return SimplicialManifold(E.dim, flow(v, t, E.vertices), E.cells.copy(),
                              E.signs.copy(), validate=False)


# ---------------------------------------------------------------------------
# integration
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _simplex_quadrature(k: int, n: int = 7):
    """Duffy-collapsed tensor Gauss-Legendre rule on the reference simplex;
    returns (nodes (Q, k), weights (Q,))."""
    x, w = np.polynomial.legendre.leggauss(n)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    if k == 1:
        return x[:, None].copy(), w.copy()
    if k == 2:
        xi, eta = np.meshgrid(x, x, indexing="ij")
        wi, wj = np.meshgrid(w, w, indexing="ij")
        lam1 = xi.reshape(-1)
        lam2 = (eta * (1.0 - xi)).reshape(-1)
        wt = (wi * wj * (1.0 - xi)).reshape(-1)
        return np.stack([lam1, lam2], axis=1), wt
    if k == 3:
        xi, eta, zeta = np.meshgrid(x, x, x, indexing="ij")
        w1, w2, w3 = np.meshgrid(w, w, w, indexing="ij")
        lam1 = xi
        lam2 = eta * (1.0 - xi)
        lam3 = zeta * (1.0 - xi) * (1.0 - eta)
        wt = w1 * w2 * w3 * (1.0 - xi) ** 2 * (1.0 - eta)
        return (np.stack([lam1.reshape(-1), lam2.reshape(-1), lam3.reshape(-1)],
                         axis=1), wt.reshape(-1))
    raise InvalidArgumentError("quadrature implemented for simplex dims 1..3")


def _simplex_moment(exps) -> float:
    """∫ over the reference k-simplex of prod lambda_i^{a_i}."""
    k = len(exps)
    num = 1.0
    for a in exps:
        num *= math.factorial(a)
    return num / math.factorial(k + sum(exps))


def _check_form(omega: DifferentialForm, E: SimplicialManifold) -> None:
    if omega.dim != E.ambient_dim:
        raise InvalidArgumentError("form lives in the wrong ambient space")
    if omega.degree != E.dim:
        raise InvalidArgumentError(
            f"degree-{omega.degree} form cannot be integrated over a "
            f"{E.dim}-dimensional manifold")


def integrate_form(omega: DifferentialForm, E: SimplicialManifold,
                   method: str = "auto", order: int = 7) -> float:
    """∫_E omega.  method: 'exact' (polynomial coefficients only),
    'quadrature', or 'auto' (exact when the form declares polynomial
    structure)."""
    _check_form(omega, E)
    if E.is_empty:
        return 0.0
    if E.dim == 0:
        pts = E.vertices[E.cells[:, 0]]
        vals = sum(c._val(pts) for c in omega.coeffs.values()) \
            if omega.coeffs else np.zeros(pts.shape[0])
        return float(E.signs @ vals)
    if method == "auto":
        method = "exact" if omega.is_polynomial else "quadrature"
    if method == "exact":
        if not omega.is_polynomial:
            raise InvalidArgumentError(
                "exact integration needs polynomial coefficients")
        return _integrate_exact(omega, E)
    if method == "quadrature":
        return _integrate_quadrature(omega, E, order)
    raise InvalidArgumentError(f"unknown integration method {method!r}")


def _index_dets(E: SimplicialManifold, I) -> np.ndarray:
    """det of the pullback of dx_I on every cell: det(Edge[:, I].T)."""
    edges = E.cell_edges()  # (C, k, m)
    M = edges[:, :, list(I)]  # (C, k, k): M[c, b, a] = d x_{I_a} / d lambda_b
    return np.linalg.det(np.swapaxes(M, 1, 2))


def _integrate_exact(omega: DifferentialForm, E: SimplicialManifold) -> float:
    P0 = E.vertices[E.cells[:, 0]]
    edges = E.cell_edges()
    total = 0.0
    for I, c in omega.coeffs.items():
        dets = _index_dets(E, I)
        for ci in range(E.n_cells):
            if dets[ci] == 0.0:
                continue
            comp = c.p_affine(edges[ci].T, P0[ci])
            val = sum(coeff * _simplex_moment(exps)
                      for exps, coeff in comp.terms.items())
            total += E.signs[ci] * dets[ci] * val
    return float(total)


def _integrate_quadrature(omega: DifferentialForm, E: SimplicialManifold,
                          order: int) -> float:
    k = E.dim
    lam, wt = _simplex_quadrature(k, order)
    P0 = E.vertices[E.cells[:, 0]]  # (C, m)
    edges = E.cell_edges()  # (C, k, m)
    X = P0[:, None, :] + np.einsum("qk,ckm->cqm", lam, edges)  # (C, Q, m)
    Xf = X.reshape(-1, E.ambient_dim)
    total = 0.0
    for I, c in omega.coeffs.items():
        dets = _index_dets(E, I)  # (C,)
        vals = c._val(Xf).reshape(E.n_cells, -1)  # (C, Q)
        total += float(np.einsum("c,c,cq,q->", E.signs, dets, vals, wt))
    return total


def integrate_form_with_estimate(omega: DifferentialForm, E: SimplicialManifold,
                                 order: int = 7) -> tuple[float, float]:
    """Quadrature value plus a refinement-based error estimate
    |I(E) - I(refine E)|."""
    coarse = integrate_form(omega, E, method="quadrature", order=order)
    fine = integrate_form(omega, refine(E), method="quadrature", order=order)
    return coarse, abs(coarse - fine)


# ---------------------------------------------------------------------------
# functionals
# ---------------------------------------------------------------------------

class SubmanifoldFunctional(PairingFunctional):
    """F(E) = psi(∫_E omega_1, ..., ∫_E omega_n)."""

    def __init__(self, psi: ScalarField, generators: Sequence[DifferentialForm],
                 label: str = "", method: str = "auto", order: int = 7):
        for g in generators:
            if not isinstance(g, DifferentialForm):
                raise InvalidArgumentError("generators must be differential forms")
        degs = {(g.dim, g.degree) for g in generators}
        if len(degs) != 1:
            raise InvalidArgumentError(
                "generators must share ambient dimension and degree")
        super().__init__(psi, generators, label=label)
        self.method = method
        self.order = order

    def _clone(self, psi, generators, label):
        return type(self)(psi, generators, label=label, method=self.method,
                          order=self.order)

    def _pair(self, E: SimplicialManifold) -> np.ndarray:
        return np.array([integrate_form(g, E, method=self.method, order=self.order)
                         for g in self.generators])

    def _derive_generator(self, v: VectorField, omega: DifferentialForm):
        return lie_derivative_form(v, omega)


def boundary_rewrite(F: SubmanifoldFunctional) -> SubmanifoldFunctional:
    """E -> F(boundary E) as a functional of E itself: generators are
    replaced by their exterior derivatives (the discrete Stokes identity)."""
    gens = [exterior_derivative(g) for g in F.generators]
    return SubmanifoldFunctional(F.psi, gens, label=f"bnd[{F.label}]",
                                 method=F.method, order=F.order)


def stokes_check(F: SubmanifoldFunctional, E: SimplicialManifold) -> float:
    """Residual |F(boundary E) - (F o boundary)(E)|."""
    return abs(F.value(boundary(E)) - boundary_rewrite(F).value(E))


def boundary_weak_diff_check(v: VectorField, F: SubmanifoldFunctional,
                             E: SimplicialManifold) -> float:
    """Residual of d/dt commuting with the boundary rewrite:
    derive(F o boundary) vs (derive F) o boundary."""
    lhs = boundary_rewrite(F).derive(v).value(E)
    rhs = F.derive(v).value(boundary(E))
    return abs(lhs - rhs)


# ---------------------------------------------------------------------------
# mesh families
# ---------------------------------------------------------------------------

def segment_mesh(n: int = 1, start=(0.0, 0.0), end=(1.0, 0.0)) -> SimplicialManifold:
    """The segment from start to end in R^len(start), n cells."""
    start = np.asarray(start, dtype=float)
    end = np.asarray(end, dtype=float)
    ts = np.linspace(0.0, 1.0, n + 1)[:, None]
    verts = (1 - ts) * start + ts * end
    cells = np.stack([np.arange(n), np.arange(1, n + 1)], axis=1)
    return SimplicialManifold(1, verts, cells)


def loop_mesh(n: int = 16, radius: float = 1.0) -> SimplicialManifold:
    """Closed n-gon inscribed in the circle of the given radius (CCW)."""
    if n < 3:
        raise InvalidArgumentError("a loop needs at least 3 segments")
    th = 2 * np.pi * np.arange(n) / n
    verts = radius * np.stack([np.cos(th), np.sin(th)], axis=1)
    cells = np.stack([np.arange(n), (np.arange(n) + 1) % n], axis=1)
    return SimplicialManifold(1, verts, cells)


def triangle_mesh(level: int = 0) -> SimplicialManifold:
    """Reference triangle (0,0)-(1,0)-(0,1), red-refined ``level`` times."""
    E = SimplicialManifold(2, [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], [[0, 1, 2]])
    for _ in range(level):
        E = refine(E)
    return E


def square_mesh(level: int = 0) -> SimplicialManifold:
    """Unit square, two CCW triangles, red-refined ``level`` times."""
    E = SimplicialManifold(2, [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
                           [[0, 1, 2], [0, 2, 3]])
    for _ in range(level):
        E = refine(E)
    return E


def disk_mesh(level: int = 0) -> SimplicialManifold:
    """Unit disk: hexagonal fan refined ``level`` times with boundary
    vertices projected to the unit circle after each refinement, so every
    level is an inscribed polygon of the true disk."""
    th = 2 * np.pi * np.arange(6) / 6
    verts = np.vstack([[0.0, 0.0], np.stack([np.cos(th), np.sin(th)], axis=1)])
    cells = [[0, 1 + i, 1 + (i + 1) % 6] for i in range(6)]
    E = SimplicialManifold(2, verts, cells)
    for _ in range(level):
        E = refine(E)
        bnd = boundary(E)
        bidx = np.unique(bnd.cells.reshape(-1))
        V = E.vertices.copy()
        norms = np.linalg.norm(V[bidx], axis=1)
        V[bidx] = V[bidx] / norms[:, None]
        E = SimplicialManifold(2, V, E.cells, E.signs, validate=False)
    return E


def sphere_mesh(level: int = 0) -> SimplicialManifold:
    """Unit sphere in R^3: icosahedron refined and reprojected; closed and
    consistently outward-oriented."""
    p = (1.0 + math.sqrt(5.0)) / 2.0
    verts = np.array([
        [-1, p, 0], [1, p, 0], [-1, -p, 0], [1, -p, 0],
        [0, -1, p], [0, 1, p], [0, -1, -p], [0, 1, -p],
        [p, 0, -1], [p, 0, 1], [-p, 0, -1], [-p, 0, 1],
    ], dtype=float)
    verts /= np.linalg.norm(verts, axis=1)[:, None]
    faces = np.array([
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ], dtype=int)
    fixed = []
    for f in faces:
        tri = verts[f]
        if np.linalg.det(tri) < 0:  # make the orientation outward
            f = f[[0, 2, 1]]
        fixed.append(f)
    E = SimplicialManifold(2, verts, np.array(fixed))
    for _ in range(level):
        E = refine(E)
        V = E.vertices / np.linalg.norm(E.vertices, axis=1)[:, None]
        E = SimplicialManifold(2, V, E.cells, E.signs, validate=False)
    return E


# ---------------------------------------------------------------------------
# smooth-disk reference and the refinement study
# ---------------------------------------------------------------------------

def circle_line_integral(omega: DifferentialForm, n_nodes: int = 4096,
                         radius: float = 1.0) -> float:
    """∫ of a 1-form over the smooth CCW circle by dense panel quadrature;
    serves as the smooth-category reference for the disk family."""
    if omega.degree != 1 or omega.dim != 2:
        raise InvalidArgumentError("need a 1-form on R^2")
    x, w = np.polynomial.legendre.leggauss(8)
    panels = max(8, n_nodes // 8)
    edges = np.linspace(0.0, 2 * np.pi, panels + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1] - edges[0])
    th = (mids[:, None] + half * x[None, :]).reshape(-1)
    wt = np.tile(half * w, panels)
    pts = radius * np.stack([np.cos(th), np.sin(th)], axis=1)
    tang = radius * np.stack([-np.sin(th), np.cos(th)], axis=1)
    total = 0.0
    for I, c in omega.coeffs.items():
        total += float(np.sum(wt * c._val(pts) * tang[:, I[0]]))
    return total


def disk_convergence_study(F: SubmanifoldFunctional, levels: int = 5):
    """Rows (level, h, boundary value, interior value, pl_residual,
    smooth_error) for the disk family.

    boundary value  = F on the polygon boundary,
    interior value  = (F o boundary-rewrite) on the polygon,
    pl_residual     = |difference| (discrete Stokes; quadrature noise only),
    smooth_error    = |interior value - F on the smooth disk| where the
                      smooth reference integrates the generators over the
                      true circle.  smooth_error decays at second order in
                      the mesh width h.
    """
    refs = np.array([circle_line_integral(g) for g in F.generators])
    f_ref = float(F.psi.eval(refs))
    rows = []
    for lvl in range(levels):
        E = disk_mesh(lvl)
        lhs = F.value(boundary(E))
        rhs = boundary_rewrite(F).value(E)
        h = 2.0 * math.sin(math.pi / (6 * 2 ** lvl))  # boundary chord length
        rows.append((lvl, h, lhs, rhs, abs(lhs - rhs), abs(rhs - f_ref)))
    return rows


# ---------------------------------------------------------------------------
# file format: "k m" / "nv nc" / vertex rows / cell rows (orientation = order)
# ---------------------------------------------------------------------------

def read_mesh(path_or_file) -> SimplicialManifold:
    fh, close = path_or_file, False
    if isinstance(path_or_file, (str, bytes)):
        fh, close = open(path_or_file, "r"), True
    try:
        tokens: list[str] = []
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if line:
                tokens.extend(line.split())
        it = iter(tokens)

        def take_int(what: str) -> int:
            try:
                return int(next(it))
            except StopIteration:
                raise InvalidMeshError(f"truncated mesh file: missing {what}")
            except ValueError as exc:
                raise InvalidMeshError(f"bad integer for {what}") from exc

        def take_float(what: str) -> float:
            try:
                return float(next(it))
            except StopIteration:
                raise InvalidMeshError(f"truncated mesh file: missing {what}")
            except ValueError as exc:
                raise InvalidMeshError(f"bad number for {what}") from exc

        k = take_int("dim")
        m = take_int("ambient dim")
        if k < 0 or m < 1 or k > m:
            raise InvalidMeshError(f"bad dimensions k={k}, m={m}")
        nv = take_int("vertex count")
        nc = take_int("cell count")
        verts = np.array([[take_float("vertex coordinate") for _ in range(m)]
                          for _ in range(nv)]).reshape(nv, m)
        cells = np.array([[take_int("cell index") for _ in range(k + 1)]
                          for _ in range(nc)], dtype=int).reshape(nc, k + 1)
        leftovers = list(it)
        if leftovers:
            raise InvalidMeshError("trailing data in mesh file")
        return SimplicialManifold(k, verts, cells)
    finally:
        if close:
            fh.close()


def write_mesh(E: SimplicialManifold, path_or_file) -> None:
    if np.any(E.signs < 0):
        raise InvalidArgumentError(
            "mesh files carry orientation by vertex order only")
    fh, close = path_or_file, False
    if isinstance(path_or_file, (str, bytes)):
        fh, close = open(path_or_file, "w"), True
    try:
        fh.write(f"{E.dim} {E.ambient_dim}\n")
        fh.write(f"{E.vertices.shape[0]} {E.n_cells}\n")
        for row in E.vertices:
            fh.write(" ".join(repr(float(c)) for c in row) + "\n")
        for cell in E.cells:
            fh.write(" ".join(str(int(i)) for i in cell) + "\n")
    finally:
        if close:
            fh.close()
