"""Named verification suites: each family checks one identity on seeded draws.

Every case function takes (rng, params) and returns a scalar residual; the
harness compares it against the family tolerance.  Residuals for identities
that involve a flow or a mesh carry the corresponding discretization budget
in their tolerance; closed-form identities get near-machine tolerances.
"""

from __future__ import annotations

import io

import numpy as np

from .curves import ActionFunctional, polynomial_curve, prolong, push_curve, \
    read_curve, smoothed_speed_density, write_curve
from .fields import LinearProfile, PolynomialField, TanhProfile, f_add, \
    f_mul
from .geometry import Derivation, Form, GeometryMorphism, \
    bracket_derivations, cartan_residual, degeneracy_residual, eval_form, \
    exterior_d, interior_bracket_residual, pushforward_commutes_residual, \
    wedge
from .harness import CaseFamily
from .mappings import MappingPoint, precompose, push_mapping, \
    mapping_embedding_rewrite, LabeledSpace
from .measures import convolution_rewrite, convolve_measures, density_map, \
    density_rewrite, embedding_rewrite, gradient, markov_defect, \
    push_measure, pushforward_measure, tangent_inner_product
from .simplicial import SubmanifoldFunctional, boundary, \
    boundary_weak_diff_check, deform, disk_convergence_study, disk_mesh, \
    integrate_form, loop_mesh, read_mesh, refine, sphere_mesh, square_mesh, \
    stokes_check, triangle_mesh, write_mesh
from .smooth import AffineEmbedding, directional_derivative, flow, \
    lie_bracket, metric_gradient, scaled_bump_field
from .sampling import curve_geometry, mapping_geometry, measure_geometry, \
    random_compact_scalar, random_curve, random_ensemble, random_form, \
    random_labeled_space, random_mapping_functional, random_mapping_point, \
    random_measure, random_measure_functional, random_metric, \
    random_polynomial, random_psi, random_submanifold_functional, \
    random_vector_field, random_action_functional

__all__ = ["SUITES"]

_ID = PolynomialField(1, {(1,): 1.0})  # psi(r) = r


def _rel(diff: float, *vals) -> float:
    return abs(diff) / (1.0 + max((abs(v) for v in vals), default=0.0))


def _central_fd(value_at, push, point, v, t: float = 1e-3) -> float:
    return (value_at(push(v, t, point)) - value_at(push(v, -t, point))) / (2 * t)


def _random_embedding(rng, low_dim: int):
    Q = np.linalg.qr(rng.normal(0.0, 1.0, size=(low_dim + 1, low_dim)))[0]
    return AffineEmbedding(Q, rng.normal(0.0, 0.3, size=low_dim + 1))


# ---------------------------------------------------------------------------
# measure suite
# ---------------------------------------------------------------------------

def _measure_data(rng, params, compact_psi=False):
    m = int(rng.integers(1, params["m"] + 1))
    n = int(rng.integers(1, params["n"] + 1))
    F = random_measure_functional(rng, m, n, compact_psi=compact_psi)
    return m, F, random_measure(rng, m)


def _m_flow_fd(rng, params):
    m, F, mu = _measure_data(rng, params)
    v = random_vector_field(rng, m)
    dv = F.derive(v).value(mu)
    fd = _central_fd(F.value, pushforward_measure, mu, v)
    return _rel(dv - fd, dv)


def _m_lie_compat(rng, params):
    m, F, mu = _measure_data(rng, params)
    v = random_vector_field(rng, m)
    w = random_vector_field(rng, m)
    lhs = F.derive(w).derive(v).value(mu) - F.derive(v).derive(w).value(mu)
    rhs = F.derive(lie_bracket(v, w)).value(mu)
    return _rel(lhs - rhs, rhs)


def _m_leibniz(rng, params):
    m, F, mu = _measure_data(rng, params)
    G = random_measure_functional(rng, m, int(rng.integers(1, params["n"] + 1)))
    v = random_vector_field(rng, m)
    lhs = F.mul(G).derive(v).value(mu)
    rhs = F.derive(v).value(mu) * G.value(mu) + F.value(mu) * G.derive(v).value(mu)
    return _rel(lhs - rhs, lhs, rhs)


def _m_linearity(rng, params):
    m, F, mu = _measure_data(rng, params)
    v = random_vector_field(rng, m)
    w = random_vector_field(rng, m)
    a, b = rng.uniform(-2.0, 2.0, size=2)
    lhs = F.derive(float(a) * v + float(b) * w).value(mu)
    rhs = a * F.derive(v).value(mu) + b * F.derive(w).value(mu)
    return _rel(lhs - rhs, lhs, rhs)


def _m_algebra(rng, params):
    m, F, mu = _measure_data(rng, params)
    G = random_measure_functional(rng, m, int(rng.integers(1, params["n"] + 1)))
    c = float(rng.uniform(-2.0, 2.0))
    r_add = F.add(G).value(mu) - (F.value(mu) + G.value(mu))
    r_mul = F.mul(G).value(mu) - F.value(mu) * G.value(mu)
    r_sca = F.scale(c).value(mu) - c * F.value(mu)
    return max(abs(r_add), abs(r_mul), abs(r_sca))


def _m_duality(rng, params):
    m, F, mu = _measure_data(rng, params)
    g = random_metric(rng, m)
    v = random_vector_field(rng, m)
    field, _ = gradient(F, mu, g)
    lhs = tangent_inner_product(v, field, mu, g)
    rhs = F.derive(v).value(mu)
    return _rel(lhs - rhs, lhs, rhs)


def _m_markov(rng, params):
    m, F, _ = _measure_data(rng, params, compact_psi=True)
    ens = random_ensemble(rng, m, size=params["ensemble"])
    g = random_metric(rng, m)
    lhs, rhs = markov_defect(F, TanhProfile(), ens, g)
    return max(0.0, lhs - rhs)


def _m_markov_equality(rng, params):
    m, F, _ = _measure_data(rng, params, compact_psi=True)
    ens = random_ensemble(rng, m, size=params["ensemble"])
    g = random_metric(rng, m)
    lhs, rhs = markov_defect(F, LinearProfile(1.0), ens, g)
    return abs(lhs - rhs)


def _m_convolution(rng, params):
    m, F, mu = _measure_data(rng, params)
    nu = random_measure(rng, m)
    lhs = F.value(convolve_measures(mu, nu))
    rhs = convolution_rewrite(nu, F).value(mu)
    return abs(lhs - rhs)


def _m_density(rng, params):
    m, F, mu = _measure_data(rng, params)
    sq = random_compact_scalar(rng, m)
    f = f_add(f_mul(sq, sq), PolynomialField(m, {(0,) * m: 0.3}))
    lhs = F.value(density_map(f, mu))
    rhs = density_rewrite(f, F).value(mu)
    return abs(lhs - rhs)


def _m_embedding(rng, params):
    m = int(rng.integers(1, params["m"] + 1))
    n = int(rng.integers(1, params["n"] + 1))
    emb = _random_embedding(rng, m)
    F = random_measure_functional(rng, m + 1, n)
    mu = random_measure(rng, m)
    v = random_vector_field(rng, m)
    G = embedding_rewrite(emb, F)
    r_val = F.value(push_measure(emb, mu)) - G.value(mu)
    lhs = G.derive(v).value(mu)
    rhs = F.derive(emb.extend_field(v)).value(push_measure(emb, mu))
    return max(abs(r_val), _rel(lhs - rhs, lhs, rhs))


# ---------------------------------------------------------------------------
# smooth suite
# ---------------------------------------------------------------------------

def _s_flow_additivity(rng, params):
    m = int(rng.integers(1, params["m"] + 1))
    v = random_vector_field(rng, m)
    X = rng.normal(0.0, 0.8, size=(4, m))
    t, s = rng.uniform(0.05, 0.2, size=2)
    both = flow(v, float(t), flow(v, float(s), X))
    once = flow(v, float(t + s), X)
    return _rel(np.max(np.abs(both - once)), np.max(np.abs(once)))


def _s_flow_velocity(rng, params):
    m = int(rng.integers(1, params["m"] + 1))
    v = random_vector_field(rng, m)
    X = rng.normal(0.0, 0.8, size=(5, m))
    t = 1e-3
    fd = (flow(v, t, X) - flow(v, -t, X)) / (2 * t)
    return float(np.max(np.abs(fd - v.eval(X))))


def _s_jacobi(rng, params):
    m = int(rng.integers(1, params["m"] + 1))
    u, v, w = (random_vector_field(rng, m) for _ in range(3))
    total = lie_bracket(lie_bracket(u, v), w) \
        + lie_bracket(lie_bracket(v, w), u) \
        + lie_bracket(lie_bracket(w, u), v)
    X = rng.normal(0.0, 0.7, size=(5, m))
    return float(np.max(np.abs(total.eval(X))))


def _s_directional_fd(rng, params):
    m = int(rng.integers(1, params["m"] + 1))
    phi = random_compact_scalar(rng, m)
    v = random_vector_field(rng, m)
    x = rng.normal(0.0, 0.6, size=m)
    d = directional_derivative(v, phi).eval(x)
    t = 1e-4
    step = t * v.eval(x)
    fd = (phi.eval(x + step) - phi.eval(x - step)) / (2 * t)
    return _rel(d - fd, d)


def _s_bracket_commutator(rng, params):
    m = int(rng.integers(1, params["m"] + 1))
    v = random_vector_field(rng, m)
    w = random_vector_field(rng, m)
    phi = random_compact_scalar(rng, m)
    lhs = directional_derivative(lie_bracket(v, w), phi)
    rhs_a = directional_derivative(v, directional_derivative(w, phi))
    rhs_b = directional_derivative(w, directional_derivative(v, phi))
    X = rng.normal(0.0, 0.6, size=(5, m))
    diff = lhs._val(X) - (rhs_a._val(X) - rhs_b._val(X))
    return _rel(np.max(np.abs(diff)), np.max(np.abs(lhs._val(X))))


def _s_metric_duality(rng, params):
    m = int(rng.integers(1, params["m"] + 1))
    phi = random_compact_scalar(rng, m)
    g = random_metric(rng, m)
    w = random_vector_field(rng, m)
    X = rng.normal(0.0, 0.6, size=(5, m))
    sharp = metric_gradient(phi, g)
    G = g.matrix(X)
    lhs = np.einsum("ni,nij,nj->n", sharp.eval(X), G, w.eval(X))
    rhs = np.einsum("ni,ni->n", phi._grad(X), w.eval(X))
    return _rel(np.max(np.abs(lhs - rhs)), np.max(np.abs(rhs)))


def _s_flow_support(rng, params):
    m = int(rng.integers(1, params["m"] + 1))
    v = random_vector_field(rng, m)
    ball = v.support
    d = rng.normal(0.0, 1.0, size=m)
    d /= np.linalg.norm(d)
    x = ball.center + 1.5 * ball.radius * d
    return float(np.max(np.abs(flow(v, 0.7, x) - x)))


# ---------------------------------------------------------------------------
# instance-independent geometry suite
# ---------------------------------------------------------------------------

def _geo_instance(rng, params):
    pick = int(rng.integers(0, 3))
    if pick == 0:
        return measure_geometry(params["m"], params["n"])
    if pick == 1:
        return mapping_geometry(params["m"], params["size"], params["n"])
    return curve_geometry(params["m"], params["n"])


def _random_derivation(inst, rng, module: bool = False) -> Derivation:
    v = inst.sample_field(rng)
    if module and rng.random() < 0.6:
        return Derivation.combination([inst.sample_element(rng)], [v])
    return Derivation.basic(v)


def _probes(inst, rng, degree: int, count: int = 3):
    out = []
    for _ in range(count):
        args = tuple(Derivation.basic(inst.sample_field(rng))
                     for _ in range(degree))
        out.append((inst.sample_point(rng), args))
    return out


def _g_d_squared(rng, params):
    inst = _geo_instance(rng, params)
    a = inst.sample_element(rng)
    b = inst.sample_element(rng)
    ddf = exterior_d(inst, exterior_d(inst, Form.generated(a)))
    two = Form.generated(a, (a, b))  # also check argument antisymmetry
    worst = 0.0
    for p, args in _probes(inst, rng, 2):
        worst = max(worst, abs(eval_form(inst, ddf, p, args)))
        plain = eval_form(inst, two, p, args)
        swapped = eval_form(inst, two, p, (args[1], args[0]))
        worst = max(worst, _rel(plain + swapped, plain))
    return worst


def _g_graded_leibniz(rng, params):
    inst = _geo_instance(rng, params)
    alpha = Form.generated(inst.sample_element(rng), (inst.sample_element(rng),))
    if rng.random() < 0.5:
        beta = Form.generated(inst.sample_element(rng), (inst.sample_element(rng),))
    else:
        beta = Form.generated(inst.sample_element(rng))
    lhs = exterior_d(inst, wedge(alpha, beta))
    sign = -1.0 if alpha.degree % 2 else 1.0
    rhs = wedge(exterior_d(inst, alpha), beta) \
        + wedge(alpha, exterior_d(inst, beta)).scale(sign)
    worst = 0.0
    for p, args in _probes(inst, rng, lhs.degree):
        x = eval_form(inst, lhs, p, args)
        y = eval_form(inst, rhs, p, args)
        worst = max(worst, _rel(x - y, x, y))
    return worst


def _g_anticommute(rng, params):
    inst = _geo_instance(rng, params)
    k, l = int(rng.integers(1, 3)), 1
    alpha = Form.generated(inst.sample_element(rng),
                           tuple(inst.sample_element(rng) for _ in range(k)))
    beta = Form.generated(inst.sample_element(rng),
                          tuple(inst.sample_element(rng) for _ in range(l)))
    sign = -1.0 if (k * l) % 2 else 1.0
    lhs = wedge(alpha, beta)
    rhs = wedge(beta, alpha).scale(sign)
    worst = 0.0
    for p, args in _probes(inst, rng, k + l, count=2):
        x = eval_form(inst, lhs, p, args)
        y = eval_form(inst, rhs, p, args)
        worst = max(worst, _rel(x - y, x, y))
    return worst


def _g_cartan(rng, params):
    inst = _geo_instance(rng, params)
    d = _random_derivation(inst, rng, module=True)
    deg = int(rng.integers(0, 2))
    form = Form.generated(inst.sample_element(rng),
                          tuple(inst.sample_element(rng) for _ in range(deg)))
    return cartan_residual(inst, d, form, _probes(inst, rng, deg))


def _g_interior_bracket(rng, params):
    inst = _geo_instance(rng, params)
    d1 = _random_derivation(inst, rng, module=True)
    d2 = _random_derivation(inst, rng)
    form = Form.generated(inst.sample_element(rng),
                          (inst.sample_element(rng), inst.sample_element(rng)))
    return interior_bracket_residual(inst, d1, d2, form,
                                     _probes(inst, rng, form.degree - 1))


def _g_degeneracy(rng, params):
    inst = _geo_instance(rng, params)
    rank = int(rng.integers(1, 4))
    return degeneracy_residual(inst, rank, rng)


def _g_derivation_module(rng, params):
    inst = _geo_instance(rng, params)
    d1 = Derivation.combination([inst.sample_element(rng)],
                                [inst.sample_field(rng)])
    d2 = _random_derivation(inst, rng)
    a = inst.sample_element(rng)
    p = inst.sample_point(rng)
    br = bracket_derivations(inst, d1, d2).apply(inst, a).value(p)
    direct = d1.apply(inst, d2.apply(inst, a)).value(p) \
        - d2.apply(inst, d1.apply(inst, a)).value(p)
    return _rel(br - direct, br, direct)


def _g_pushforward(rng, params):
    m = params["m"]
    emb = _random_embedding(rng, m)
    source = measure_geometry(m + 1, params["n"])
    target = measure_geometry(m, params["n"])
    morphism = GeometryMorphism(
        source=source, target=target,
        map_element=lambda F: embedding_rewrite(emb, F),
        map_point=lambda mu: push_measure(emb, mu),
        correspond=lambda v: emb.extend_field(v))
    form = Form.generated(source.sample_element(rng),
                          (source.sample_element(rng),))
    probes = _probes(target, rng, 1, count=2)
    r1 = pushforward_commutes_residual(morphism, form, probes)
    dprobes = _probes(target, rng, 2, count=2)
    r2 = pushforward_commutes_residual(morphism, exterior_d(source, form),
                                       dprobes)
    return max(r1, r2)


# ---------------------------------------------------------------------------
# mapping suite
# ---------------------------------------------------------------------------

def _mapping_data(rng, params):
    m = int(rng.integers(1, params["m"] + 1))
    space = random_labeled_space(rng, params["size"])
    arity = int(rng.integers(1, params["n"] + 1))
    F = random_mapping_functional(rng, m, arity, space)
    P = random_mapping_point(rng, params["size"], m)
    return m, space, F, P


def _p_flow_fd(rng, params):
    m, _, F, P = _mapping_data(rng, params)
    v = random_vector_field(rng, m)
    dv = F.derive(v).value(P)
    fd = _central_fd(F.value, push_mapping, P, v)
    return _rel(dv - fd, dv)


def _p_lie_compat(rng, params):
    m, _, F, P = _mapping_data(rng, params)
    v = random_vector_field(rng, m)
    w = random_vector_field(rng, m)
    lhs = F.derive(w).derive(v).value(P) - F.derive(v).derive(w).value(P)
    rhs = F.derive(lie_bracket(v, w)).value(P)
    return _rel(lhs - rhs, rhs)


def _p_algebra(rng, params):
    m, space, F, P = _mapping_data(rng, params)
    G = random_mapping_functional(rng, m, int(rng.integers(1, params["n"] + 1)),
                                  space)
    c = float(rng.uniform(-2.0, 2.0))
    r_add = F.add(G).value(P) - (F.value(P) + G.value(P))
    r_mul = F.mul(G).value(P) - F.value(P) * G.value(P)
    r_sca = F.scale(c).value(P) - c * F.value(P)
    return max(abs(r_add), abs(r_mul), abs(r_sca))


def _p_leibniz(rng, params):
    m, space, F, P = _mapping_data(rng, params)
    G = random_mapping_functional(rng, m, int(rng.integers(1, params["n"] + 1)),
                                  space)
    v = random_vector_field(rng, m)
    lhs = F.mul(G).derive(v).value(P)
    rhs = F.derive(v).value(P) * G.value(P) + F.value(P) * G.derive(v).value(P)
    return _rel(lhs - rhs, lhs, rhs)


def _p_precompose(rng, params):
    m, source, F, _ = _mapping_data(rng, params)
    target_size = params["size"] - 1
    pi = rng.integers(0, target_size, size=source.size)
    pushed = {}
    for name, mu in source.measures.items():
        out = np.zeros(target_size)
        np.add.at(out, pi, mu)
        pushed[name] = out
    target = LabeledSpace(target_size, pushed)
    G = precompose(pi, source, target, F)
    Pp = random_mapping_point(rng, target_size, m)
    return abs(G.value(Pp) - F.value(Pp.compose_labels(pi)))


def _p_embedding(rng, params):
    m = int(rng.integers(1, params["m"] + 1))
    emb = _random_embedding(rng, m)
    space = random_labeled_space(rng, params["size"])
    F = random_mapping_functional(rng, m + 1, int(rng.integers(1, params["n"] + 1)),
                                  space)
    P = random_mapping_point(rng, params["size"], m)
    v = random_vector_field(rng, m)
    G = mapping_embedding_rewrite(emb, F)
    embedded = MappingPoint(emb.apply(P.values))
    r_val = F.value(embedded) - G.value(P)
    lhs = G.derive(v).value(P)
    rhs = F.derive(emb.extend_field(v)).value(embedded)
    return max(abs(r_val), _rel(lhs - rhs, lhs, rhs))


def _p_equivalence(rng, params):
    m, _, F, P = _mapping_data(rng, params)
    v = random_vector_field(rng, m)
    far = 40.0 + rng.uniform(0.0, 5.0)
    u = scaled_bump_field(np.full(m, far), 1.0,
                          [{(0,) * m: 1.0} for _ in range(m)])
    lhs = F.derive(v + u).value(P)
    rhs = F.derive(v).value(P)
    return _rel(lhs - rhs, lhs, rhs)


# ---------------------------------------------------------------------------
# submanifold suite
# ---------------------------------------------------------------------------

def _area_mesh(rng, max_level: int = 2, min_level: int = 0):
    builder = (square_mesh, triangle_mesh, disk_mesh)[int(rng.integers(0, 3))]
    return builder(int(rng.integers(min_level, max_level + 1)))


def _b_exact_vs_quadrature(rng, params):
    E = _area_mesh(rng)
    omega = random_form(rng, 2, 2, polynomial=True)
    return abs(integrate_form(omega, E, method="exact")
               - integrate_form(omega, E, method="quadrature"))


def _b_stokes_poly(rng, params):
    E = _area_mesh(rng)
    F = random_submanifold_functional(rng, 1, n=int(rng.integers(1, 3)),
                                      polynomial=True)
    return stokes_check(F, E)


def _b_stokes_closed(rng, params):
    if rng.random() < 0.5:
        E = loop_mesh(int(rng.integers(6, 20)))
        gens = [random_form(rng, 2, 0, polynomial=True)]
    else:
        E = sphere_mesh(int(rng.integers(0, 2)))
        gens = [random_form(rng, 3, 1, polynomial=True)]
    F = SubmanifoldFunctional(random_psi(rng, 1, style="poly"), gens)
    return stokes_check(F, E)


def _b_stokes_convergence(rng, params):
    gens = [random_form(rng, 2, 1) for _ in range(2)]
    psi = random_polynomial(rng, 2, degree=2, scale=0.8)
    F = SubmanifoldFunctional(psi, gens, method="quadrature")
    errs = [row[5] for row in disk_convergence_study(F, levels=5)]
    worst = 0.0
    for e0, e1 in zip(errs, errs[1:]):
        if e1 <= 1e-12:  # below quadrature noise; ratios are meaningless
            break
        ratio = e0 / e1
        worst = max(worst, 2.6 - ratio, ratio - 6.0, 0.0)
    return worst


def _b_weak_diff(rng, params):
    # the derived generators have bump coefficients, so quadrature must
    # resolve them: cells no coarser than level 1, 10 nodes per axis
    E = _area_mesh(rng, min_level=1)
    F = random_submanifold_functional(rng, 1, n=int(rng.integers(1, 3)),
                                      polynomial=True)
    F = SubmanifoldFunctional(F.psi, F.generators, order=10)
    v = random_vector_field(rng, 2)
    return boundary_weak_diff_check(v, F, E)


def _b_deform_fd(rng, params):
    E = square_mesh(params["mesh_level"])
    F = random_submanifold_functional(rng, 2, polynomial=True)
    v = random_vector_field(rng, 2)
    dv = F.derive(v).value(E)
    fd = _central_fd(F.value, deform, E, v)
    return _rel(dv - fd, dv)


def _b_deform_fd_loop(rng, params):
    E = loop_mesh(8 * 2 ** params["mesh_level"])
    F = random_submanifold_functional(rng, 1, polynomial=True)
    v = random_vector_field(rng, 2)
    dv = F.derive(v).value(E)
    fd = _central_fd(F.value, deform, E, v)
    return _rel(dv - fd, dv)


def _b_orientation(rng, params):
    E = _area_mesh(rng)
    bnd = boundary(E)
    residual = float(boundary(bnd).cells.shape[0])  # closed boundary
    seg_bnd = boundary(loop_mesh(int(rng.integers(4, 12))))
    residual += float(seg_bnd.cells.shape[0])  # loops have none at all
    return residual


def _b_refine_invariance(rng, params):
    E = (square_mesh, triangle_mesh)[int(rng.integers(0, 2))](
        int(rng.integers(0, 3)))
    omega = random_form(rng, 2, 2, polynomial=True)
    return abs(integrate_form(omega, E, method="exact")
               - integrate_form(omega, refine(E), method="exact"))


def _b_mesh_io(rng, params):
    E = _area_mesh(rng, max_level=1)
    buf = io.StringIO()
    write_mesh(E, buf)
    buf.seek(0)
    E2 = read_mesh(buf)
    if E2.cells.shape != E.cells.shape or np.any(E2.cells != E.cells):
        return 1.0
    return float(np.max(np.abs(E2.vertices - E.vertices), initial=0.0))


# ---------------------------------------------------------------------------
# curve suite
# ---------------------------------------------------------------------------

def _curve_data(rng, params):
    m = int(rng.integers(1, params["m"] + 1))
    n = int(rng.integers(1, params["n"] + 1))
    F = random_action_functional(rng, m, n)
    return m, F, random_curve(rng, m)


def _c_flow_fd(rng, params):
    m, F, C = _curve_data(rng, params)
    v = random_vector_field(rng, m)
    dv = F.derive(v).value(C)
    fd = _central_fd(F.value, push_curve, C, v)
    return _rel(dv - fd, dv)


def _c_lie_compat(rng, params):
    m, F, C = _curve_data(rng, params)
    v = random_vector_field(rng, m)
    w = random_vector_field(rng, m)
    lhs = F.derive(w).derive(v).value(C) - F.derive(v).derive(w).value(C)
    rhs = F.derive(lie_bracket(v, w)).value(C)
    return _rel(lhs - rhs, rhs)


def _c_prolong_lie(rng, params):
    m = int(rng.integers(1, params["m"] + 1))
    v = random_vector_field(rng, m)
    w = random_vector_field(rng, m)
    lhs = prolong(lie_bracket(v, w))
    rhs = lie_bracket(prolong(v), prolong(w))
    X = rng.normal(0.0, 0.7, size=(6, 2 * m))
    diff = np.max(np.abs(lhs.eval(X) - rhs.eval(X)))
    return _rel(diff, np.max(np.abs(lhs.eval(X))))


def _c_reparam(rng, params):
    m, _, C = _curve_data(rng, params)
    L = ActionFunctional(_ID, [smoothed_speed_density(m)])
    c = float(rng.uniform(0.5, 2.0))
    # affine reparametrization s -> c s of the same polynomial trace
    coeffs = _poly_coeffs_of(C)
    scaled = coeffs * (c ** np.arange(coeffs.shape[0]))[:, None]
    C2 = polynomial_curve(scaled, 0.0, C.b / c)
    return _rel(L.value(C) - L.value(C2), L.value(C))


def _poly_coeffs_of(C):
    """Recover polynomial coefficients from a curve by sampling (degree <= 3)."""
    s = np.linspace(C.a, C.b, 4)
    V = np.vander(s, 4, increasing=True)
    return np.linalg.solve(V, C.position(s))


def _c_velocity_fd(rng, params):
    m, _, C = _curve_data(rng, params)
    s = rng.uniform(C.a + 0.05, C.b - 0.05, size=4)
    eps = 1e-5
    fd = (C.position(s + eps) - C.position(s - eps)) / (2 * eps)
    diff = np.max(np.abs(fd - C.velocity(s)))
    return _rel(diff, np.max(np.abs(C.velocity(s))))


def _c_algebra(rng, params):
    m, F, C = _curve_data(rng, params)
    G = random_action_functional(rng, m, int(rng.integers(1, params["n"] + 1)))
    c = float(rng.uniform(-2.0, 2.0))
    r_add = F.add(G).value(C) - (F.value(C) + G.value(C))
    r_mul = F.mul(G).value(C) - F.value(C) * G.value(C)
    r_sca = F.scale(c).value(C) - c * F.value(C)
    return max(abs(r_add), abs(r_mul), abs(r_sca))


def _c_spline_io(rng, params):
    m, F, C = _curve_data(rng, params)
    buf = io.StringIO()
    write_curve(C, buf)
    buf.seek(0)
    C2 = read_curve(buf)
    return _rel(F.value(C) - F.value(C2), F.value(C))


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

def _fam(name, desc, anchor, tol, count, fn):
    return CaseFamily(name=name, desc=desc, anchor=anchor, tolerance=tol,
                      count=count, fn=fn)


SUITES = {
    "measure-core": [
        _fam("flow-fd", "closed-form lifted derivative vs central difference "
             "along the pushforward flow", "chain rule along the flow",
             1e-5, 10, _m_flow_fd),
        _fam("lie-compat", "mixed second derivatives close on the bracket "
             "derivative", "second derivatives close on the Lie bracket",
             1e-8, 8, _m_lie_compat),
        _fam("leibniz", "product rule for the lifted derivative",
             "Leibniz rule", 1e-9, 6, _m_leibniz),
        _fam("linearity", "derivative is linear in the vector field",
             "linearity in the field", 1e-9, 6, _m_linearity),
        _fam("algebra", "sums, products and scalings evaluate pointwise",
             "algebra operations are pointwise", 1e-12, 4, _m_algebra),
        _fam("gradient-duality", "metric gradient pairs against fields like "
             "the lifted derivative", "gradient duality", 1e-9, 6, _m_duality),
        _fam("markov-contraction", "quadratic energy does not grow under a "
             "unit-slope contraction of the outer function",
             "energy contraction", 1e-12, 6, _m_markov),
        _fam("markov-equality", "slope-one linear contraction leaves the "
             "energy unchanged", "energy contraction is tight", 1e-12, 4,
             _m_markov_equality),
        _fam("convolution-rewrite", "convolution against a fixed measure "
             "rewrites to shifted generators", "convolution rewrite",
             1e-12, 5, _m_convolution),
        _fam("density-rewrite", "density reweighting rewrites to multiplied "
             "generators", "density rewrite", 1e-12, 5, _m_density),
        _fam("embedding-pullback", "embedding rewrite matches pushforward "
             "evaluation and derivatives", "embedding functoriality",
             1e-9, 5, _m_embedding),
    ],
    "smooth-core": [
        _fam("flow-additivity", "time additivity of the flow map",
             "flow group law", 1e-8, 6, _s_flow_additivity),
        _fam("flow-velocity-fd", "flow velocity at time zero is the field",
             "flow velocity", 1e-5, 6, _s_flow_velocity),
        _fam("bracket-jacobi", "Jacobi identity for the Lie bracket",
             "Jacobi identity", 1e-9, 4, _s_jacobi),
        _fam("directional-fd", "directional derivative vs central difference",
             "directional derivative", 1e-6, 6, _s_directional_fd),
        _fam("bracket-commutator", "bracket acts as the commutator on scalar "
             "fields", "bracket as commutator", 1e-8, 4, _s_bracket_commutator),
        _fam("metric-duality", "metric sharp inverts the pairing",
             "sharp-flat duality", 1e-10, 5, _s_metric_duality),
        _fam("flow-support", "points outside the support never move",
             "compact support", 1e-12, 3, _s_flow_support),
    ],
    "geometry-core": [
        _fam("d-squared", "exterior derivative squares to zero; arguments "
             "are antisymmetric", "d squared vanishes", 1e-8, 6, _g_d_squared),
        _fam("graded-leibniz", "exterior derivative is a graded derivation "
             "of the wedge", "graded Leibniz", 1e-8, 6, _g_graded_leibniz),
        _fam("wedge-anticommute", "wedge product graded-commutes",
             "graded commutativity", 1e-8, 6, _g_anticommute),
        _fam("cartan", "Lie derivative equals d i + i d",
             "homotopy formula", 1e-8, 6, _g_cartan),
        _fam("interior-bracket", "interior product along a bracket is the "
             "commutator of Lie derivative and contraction",
             "contraction along brackets", 1e-8, 6, _g_interior_bracket),
        _fam("degeneracy", "forms above the spanning rank vanish",
             "rank degeneracy", 1e-12, 6, _g_degeneracy),
        _fam("derivation-module", "module bracket agrees with the operator "
             "commutator", "module bracket", 1e-9, 5, _g_derivation_module),
        _fam("morphism-pushforward", "pushforward along an embedding "
             "commutes with evaluation and d", "pushforward naturality",
             1e-9, 4, _g_pushforward),
    ],
    "mapping-core": [
        _fam("flow-fd", "closed-form lifted derivative vs central difference "
             "along the pushforward flow", "chain rule along the flow",
             1e-5, 8, _p_flow_fd),
        _fam("lie-compat", "mixed second derivatives close on the bracket "
             "derivative", "second derivatives close on the Lie bracket",
             1e-8, 6, _p_lie_compat),
        _fam("algebra", "sums, products and scalings evaluate pointwise",
             "algebra operations are pointwise", 1e-12, 4, _p_algebra),
        _fam("leibniz", "product rule for the lifted derivative",
             "Leibniz rule", 1e-9, 4, _p_leibniz),
        _fam("precompose", "label precomposition rewrites through pushed "
             "measures", "precomposition rewrite", 1e-12, 4, _p_precompose),
        _fam("embedding", "embedding rewrite matches blockwise pullback and "
             "derivatives", "embedding functoriality", 1e-9, 4, _p_embedding),
        _fam("equivalence", "fields equal on the mapping range induce equal "
             "derivatives", "derivative depends on the range only",
             1e-10, 3, _p_equivalence),
    ],
    "submanifold-core": [
        _fam("exact-vs-quadrature", "polynomial moment integration agrees "
             "with Gauss quadrature", "two integration paths", 1e-10, 5,
             _b_exact_vs_quadrature),
        _fam("stokes-poly", "boundary evaluation equals the exterior-"
             "derivative rewrite", "Stokes identity", 1e-12, 6, _b_stokes_poly),
        _fam("stokes-closed", "exact forms integrate to zero over closed "
             "meshes", "Stokes on closed meshes", 1e-12, 4, _b_stokes_closed),
        _fam("stokes-convergence", "inscribed-polygon error halves at second "
             "order", "second-order geometric convergence", 1e-9, 1,
             _b_stokes_convergence),
        _fam("weak-diff", "derivative commutes with the boundary rewrite",
             "boundary weak differentiability", 1e-10, 5, _b_weak_diff),
        _fam("deform-fd", "lifted derivative vs central difference under "
             "mesh deformation", "chain rule along the flow", 1e-4, 2,
             _b_deform_fd),
        _fam("deform-fd-loop", "lifted derivative vs central difference on "
             "a deforming loop", "chain rule along the flow", 1e-4, 2,
             _b_deform_fd_loop),
        _fam("orientation", "boundaries are closed and loops have none",
             "boundary of a boundary", 1e-12, 4, _b_orientation),
        _fam("refine-invariance", "exact integrals are refinement-invariant",
             "refinement invariance", 1e-10, 3, _b_refine_invariance),
        _fam("mesh-io", "mesh files round-trip bit-exactly",
             "mesh file format", 1e-15, 3, _b_mesh_io),
    ],
    "curve-core": [
        _fam("flow-fd", "closed-form lifted derivative vs central difference "
             "along the prolonged flow", "chain rule along the flow",
             1e-5, 8, _c_flow_fd),
        _fam("lie-compat", "mixed second derivatives close on the bracket "
             "derivative", "second derivatives close on the Lie bracket",
             1e-8, 6, _c_lie_compat),
        _fam("prolong-lie", "prolongation is a Lie algebra map",
             "prolongation preserves brackets", 1e-8, 4, _c_prolong_lie),
        _fam("reparam", "smoothed arc length is reparametrization-invariant",
             "parametrization independence", 1e-8, 3, _c_reparam),
        _fam("velocity-fd", "stored velocity is the derivative of position",
             "velocity consistency", 1e-6, 4, _c_velocity_fd),
        _fam("algebra", "sums, products and scalings evaluate pointwise",
             "algebra operations are pointwise", 1e-12, 4, _c_algebra),
        _fam("spline-io", "curve files reconstruct to the same action values",
             "curve file format", 1e-8, 3, _c_spline_io),
    ],
}
