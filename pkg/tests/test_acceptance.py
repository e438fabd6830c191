"""End-to-end acceptance gate.

Twelve criteria, one test each.  Every test prints a single
``[PASS]/[FAIL] criterion NN: ...`` line (run ``pytest -s`` to see them on
passing runs) and asserts its stated tolerance.  All finite-difference and
reference values are computed in this file, independently of the library's
own verification suites.
"""

import json
import subprocess
import sys

import numpy as np

from lifted.curves import push_curve
from lifted.fields import LinearProfile, TanhProfile, f_mul
from lifted.forms import exterior_derivative
from lifted.geometry import Derivation, Form, bracket_derivations, eval_form, \
    exterior_d, interior_product, lie_derivative, wedge
from lifted.harness import SuiteConfig, run_suite
from lifted.mappings import (MappingPoint, mapping_embedding_rewrite,
                             push_mapping)
from lifted.measures import (convolution_rewrite, convolve_measures,
                             density_map, density_rewrite, embedding_rewrite,
                             gradient, markov_defect, push_measure,
                             pushforward_measure, tangent_inner_product)
from lifted.sampling import (curve_geometry, mapping_geometry,
                             measure_geometry, random_action_functional,
                             random_compact_scalar, random_curve,
                             random_ensemble, random_form,
                             random_labeled_space, random_mapping_functional,
                             random_mapping_point, random_measure,
                             random_measure_functional, random_metric,
                             random_polynomial, random_vector_field,
                             submanifold_geometry)
from lifted.simplicial import (SubmanifoldFunctional, boundary,
                               circle_line_integral, disk_mesh, square_mesh,
                               triangle_mesh)
from lifted.smooth import AffineEmbedding, lie_bracket

FD_STEP = 1e-3


def _report(num, desc, worst, tol):
    status = "PASS" if worst <= tol else "FAIL"
    print(f"[{status}] criterion {num:02d}: {desc} "
          f"(worst residual {worst:.3e} vs tolerance {tol:.1e})")
    assert worst <= tol, (
        f"criterion {num:02d}: worst residual {worst:.3e} exceeds {tol:.1e}")


def _rel(lhs, rhs):
    return abs(lhs - rhs) / (1.0 + max(abs(lhs), abs(rhs)))


# ---------------------------------------------------------------------------
# the four functional instances, with their points / elements / group action
# ---------------------------------------------------------------------------

_SPACE = random_labeled_space(np.random.default_rng(12), 3)


def _poly_submanifold(rng, n=2):
    gens = [random_form(rng, 2, 2, polynomial=True) for _ in range(n)]
    return SubmanifoldFunctional(random_polynomial(rng, n, degree=2), gens,
                                 order=10)


_INSTANCES = {
    "measure": {
        "point": lambda rng: random_measure(rng, 2),
        "element": lambda rng: random_measure_functional(rng, 2, 2),
        "field": lambda rng: random_vector_field(rng, 2),
    },
    "mapping": {
        "point": lambda rng: random_mapping_point(rng, _SPACE.size, 2),
        "element": lambda rng: random_mapping_functional(rng, 2, 2, _SPACE),
        "field": lambda rng: random_vector_field(rng, 2),
    },
    "curve": {
        "point": lambda rng: random_curve(rng, 2),
        "element": lambda rng: random_action_functional(rng, 2, 2),
        "field": lambda rng: random_vector_field(rng, 2),
    },
    "submanifold": {
        "point": lambda rng: (square_mesh(1) if rng.random() < 0.5
                              else triangle_mesh(1)),
        "element": _poly_submanifold,
        "field": lambda rng: random_vector_field(rng, 2),
    },
}

_GEOMETRIES = {
    "measure": measure_geometry(),
    "mapping": mapping_geometry(),
    "curve": curve_geometry(),
    "submanifold": submanifold_geometry("square", level=1),
}


# ---------------------------------------------------------------------------
# criteria 1-2: closed-form lifted derivatives against flow finite differences
# ---------------------------------------------------------------------------

def test_criterion_01_measure_derivative_matches_flow():
    rng = np.random.default_rng(202601)
    worst = 0.0
    for _ in range(50):
        m = int(rng.integers(1, 4))
        n = int(rng.integers(1, 4))
        F = random_measure_functional(rng, m, n)
        mu = random_measure(rng, m)
        v = random_vector_field(rng, m)
        dv = F.derive(v).value(mu)
        fd = (F.value(pushforward_measure(v, FD_STEP, mu))
              - F.value(pushforward_measure(v, -FD_STEP, mu))) / (2 * FD_STEP)
        worst = max(worst, abs(dv - fd) / (1.0 + abs(dv)))
    _report(1, "measure derivative = flow finite difference (50 cases)",
            worst, 1e-5)


def test_criterion_02_mapping_and_curve_derivatives_match_flow():
    rng = np.random.default_rng(202602)
    t = 1e-4  # prolonged transports carry larger third derivatives
    worst = 0.0
    for _ in range(30):
        m = int(rng.integers(1, 4))
        space = random_labeled_space(rng, int(rng.integers(2, 5)))
        F = random_mapping_functional(rng, m, int(rng.integers(1, 3)), space)
        P = random_mapping_point(rng, space.size, m)
        v = random_vector_field(rng, m)
        dv = F.derive(v).value(P)
        fd = (F.value(push_mapping(v, t, P))
              - F.value(push_mapping(v, -t, P))) / (2 * t)
        worst = max(worst, abs(dv - fd) / (1.0 + abs(dv)))
    for _ in range(30):
        m = int(rng.integers(1, 4))
        F = random_action_functional(rng, m, int(rng.integers(1, 3)))
        C = random_curve(rng, m)
        v = random_vector_field(rng, m)
        dv = F.derive(v).value(C)
        fd = (F.value(push_curve(v, t, C))
              - F.value(push_curve(v, -t, C))) / (2 * t)
        worst = max(worst, abs(dv - fd) / (1.0 + abs(dv)))
    _report(2, "mapping and curve derivatives = flow finite differences "
               "(30 + 30 cases)", worst, 1e-5)


# ---------------------------------------------------------------------------
# criteria 3-4: the derivation family is a Lie algebra action by derivations
# ---------------------------------------------------------------------------

def test_criterion_03_lie_bracket_compatibility():
    rng = np.random.default_rng(202603)
    worst = 0.0
    for name, inst in _INSTANCES.items():
        for _ in range(50):
            F = inst["element"](rng)
            p = inst["point"](rng)
            v = inst["field"](rng)
            w = inst["field"](rng)
            lhs = (F.derive(w).derive(v).value(p)
                   - F.derive(v).derive(w).value(p))
            rhs = F.derive(lie_bracket(v, w)).value(p)
            worst = max(worst, _rel(lhs, rhs))
    _report(3, "derivative commutators realize the field bracket "
               "(50 cases x 4 instances)", worst, 1e-8)


def test_criterion_04_leibniz_and_linearity():
    rng = np.random.default_rng(202604)
    names = sorted(_INSTANCES)
    worst = 0.0
    for k in range(50):
        inst = _INSTANCES[names[k % 4]]
        F = inst["element"](rng)
        G = inst["element"](rng)
        p = inst["point"](rng)
        v = inst["field"](rng)
        w = inst["field"](rng)
        # product rule
        lhs = F.mul(G).derive(v).value(p)
        rhs = (F.derive(v).value(p) * G.value(p)
               + F.value(p) * G.derive(v).value(p))
        worst = max(worst, _rel(lhs, rhs))
        # linearity in the field argument
        a, b = float(rng.uniform(-2, 2)), float(rng.uniform(-2, 2))
        lhs = F.derive(a * v + b * w).value(p)
        rhs = a * F.derive(v).value(p) + b * F.derive(w).value(p)
        worst = max(worst, _rel(lhs, rhs))
    _report(4, "derivatives are derivations, linear in the field (50 cases)",
            worst, 1e-9)


# ---------------------------------------------------------------------------
# criterion 5: exterior algebra identities on generated forms
# ---------------------------------------------------------------------------

def _probe(geo, rng, degree):
    return (geo.sample_point(rng),
            tuple(Derivation.basic(geo.sample_field(rng))
                  for _ in range(degree)))


def _module_derivation(geo, rng):
    return Derivation.combination(
        [geo.sample_element(rng), float(rng.uniform(-2, 2))],
        [geo.sample_field(rng), geo.sample_field(rng)])


def test_criterion_05_exterior_calculus_identities():
    rng = np.random.default_rng(202605)
    worst = {"d-squared": 0.0, "graded-leibniz": 0.0, "anticommute": 0.0,
             "cartan": 0.0, "contraction-bracket": 0.0}
    for name in sorted(_GEOMETRIES):
        geo = _GEOMETRIES[name]
        for _ in range(4):            # 4 configs x 2 probes x 4 instances = 32
            e = [geo.sample_element(rng) for _ in range(5)]
            alpha = Form.generated(e[0], (e[1],))
            beta = Form.generated(e[2], (e[3],))
            dd = exterior_d(geo, exterior_d(geo, alpha))
            # d(alpha ^ beta) = d alpha ^ beta - alpha ^ d beta  (deg alpha = 1)
            gl_lhs = exterior_d(geo, wedge(alpha, beta))
            gl_rhs = wedge(exterior_d(geo, alpha), beta) \
                - wedge(alpha, exterior_d(geo, beta))
            # anticommutativity of the wedge of two 1-forms
            anti = wedge(alpha, beta) + wedge(beta, alpha)
            # Cartan's homotopy formula on a 1-form
            D = _module_derivation(geo, rng)
            ca_lhs = lie_derivative(geo, D, alpha)
            ca_rhs = interior_product(geo, D, exterior_d(geo, alpha)) \
                + exterior_d(geo, interior_product(geo, D, alpha))
            # contraction along a bracket on a 2-form
            omega = Form.generated(e[4], (e[1], e[3]))
            D1 = Derivation.basic(geo.sample_field(rng))
            ib_lhs = interior_product(geo, bracket_derivations(geo, D1, D),
                                      omega)
            ib_rhs_a = lie_derivative(geo, D1, interior_product(geo, D, omega))
            ib_rhs_b = interior_product(geo, D, lie_derivative(geo, D1, omega))
            for _ in range(2):
                p3 = _probe(geo, rng, 3)
                worst["d-squared"] = max(
                    worst["d-squared"],
                    abs(eval_form(geo, dd, *p3)))
                a = eval_form(geo, gl_lhs, *p3)
                b = eval_form(geo, gl_rhs, *p3)
                worst["graded-leibniz"] = max(worst["graded-leibniz"],
                                              _rel(a, b))
                p2 = _probe(geo, rng, 2)
                worst["anticommute"] = max(
                    worst["anticommute"],
                    abs(eval_form(geo, anti, *p2)))
                p1 = _probe(geo, rng, 1)
                a = eval_form(geo, ca_lhs, *p1)
                b = eval_form(geo, ca_rhs, *p1)
                worst["cartan"] = max(worst["cartan"], _rel(a, b))
                a = eval_form(geo, ib_lhs, *p1)
                b = eval_form(geo, ib_rhs_a, *p1) - eval_form(geo, ib_rhs_b, *p1)
                worst["contraction-bracket"] = max(
                    worst["contraction-bracket"], _rel(a, b))
    top = max(worst.values())
    _report(5, "exterior calculus identities, 32 probes each "
               f"({', '.join(f'{k} {v:.1e}' for k, v in worst.items())})",
            top, 1e-8)


def test_criterion_06_rank_degeneracy():
    rng = np.random.default_rng(202606)
    worst = 0.0
    for name in sorted(_GEOMETRIES):
        geo = _GEOMETRIES[name]
        for rank in (1, 2):
            for _ in range(2):
                fields = [geo.sample_field(rng) for _ in range(rank)]
                elems = [geo.sample_element(rng) for _ in range(rank + 2)]
                form = Form.generated(elems[0], elems[1:rank + 2])
                args = []
                for _ in range(rank + 1):
                    coeffs = [geo.sample_element(rng) if rng.random() < 0.5
                              else float(rng.uniform(-2, 2))
                              for _ in range(rank)]
                    args.append(Derivation.combination(coeffs, fields))
                p = geo.sample_point(rng)
                worst = max(worst, abs(eval_form(geo, form, p, args)))
    _report(6, "(r+1)-forms vanish on derivations spanned by r fields",
            worst, 1e-12)


# ---------------------------------------------------------------------------
# criteria 7-8: metric gradients and the quadratic energy
# ---------------------------------------------------------------------------

def test_criterion_07_gradient_duality():
    rng = np.random.default_rng(202607)
    worst = 0.0
    for _ in range(10):
        F = random_measure_functional(rng, 2, int(rng.integers(1, 4)))
        mu = random_measure(rng, 2)
        g = random_metric(rng, 2)
        grad_field, _ = gradient(F, mu, g)
        for _ in range(20):
            v = random_vector_field(rng, 2)
            pairing = tangent_inner_product(grad_field, v, mu, g)
            dv = F.derive(v).value(mu)
            worst = max(worst, abs(pairing - dv) / (1.0 + abs(dv)))
    _report(7, "metric gradient pairs to the lifted derivative "
               "(10 instances x 20 fields)", worst, 1e-9)


def test_criterion_08_energy_contraction():
    rng = np.random.default_rng(202608)
    worst = 0.0
    eq_worst = 0.0
    for _ in range(100):
        F = random_measure_functional(rng, 2, int(rng.integers(1, 3)),
                                      compact_psi=True)
        ens = random_ensemble(rng, 2, size=int(rng.integers(1, 4)))
        g = random_metric(rng, 2)
        contracted, base = markov_defect(F, TanhProfile(), ens, g)
        worst = max(worst, contracted - base)
        same, base2 = markov_defect(F, LinearProfile(1.0), ens, g)
        eq_worst = max(eq_worst, abs(same - base2))
    _report(8, "post-composition with a contraction never raises the energy; "
               f"slope-one equality within {eq_worst:.1e} (100 instances)",
            max(worst, eq_worst), 1e-12)


# ---------------------------------------------------------------------------
# criteria 9-10: discrete Stokes identity and its weak derivative
# ---------------------------------------------------------------------------

def _poly_boundary_pair(rng, n=2):
    gens = [random_form(rng, 2, 1, polynomial=True) for _ in range(n)]
    psi = random_polynomial(rng, n, degree=2)
    F = SubmanifoldFunctional(psi, gens, order=10)
    G = SubmanifoldFunctional(psi, [exterior_derivative(g) for g in gens],
                              order=10)
    return F, G


def test_criterion_09_stokes_identity_and_convergence():
    rng = np.random.default_rng(202609)
    worst = 0.0
    for _ in range(12):
        F, G = _poly_boundary_pair(rng)
        for E in (square_mesh(1), triangle_mesh(1), disk_mesh(1)):
            worst = max(worst, abs(F.value(boundary(E)) - G.value(E)))
    _report(9, "boundary rewrite equals integration over the boundary "
               "(12 functionals x 3 mesh families)", worst, 1e-12)

    # second-order convergence of the polygonal value to the smooth disk
    rng = np.random.default_rng(7)
    F, G = _poly_boundary_pair(rng)
    refs = np.array([circle_line_integral(g) for g in F.generators])
    smooth = float(F.psi.eval(refs))
    errors = [abs(G.value(disk_mesh(lvl)) - smooth) for lvl in range(5)]
    ratios = [a / b for a, b in zip(errors, errors[1:])]
    ok = all(2.6 <= r <= 6.0 for r in ratios)
    status = "PASS" if ok else "FAIL"
    print(f"[{status}] criterion 09b: disk refinement halves the mesh width, "
          f"errors shrink at second order (ratios "
          f"{', '.join(f'{r:.2f}' for r in ratios)}, expected within "
          f"[2.6, 6.0])")
    assert ok, f"convergence ratios {ratios} outside [2.6, 6.0]"


def test_criterion_10_boundary_weak_derivative():
    rng = np.random.default_rng(202610)
    worst = 0.0
    for k in range(12):
        F, G = _poly_boundary_pair(rng)
        E = square_mesh(1 + k % 2) if k % 3 else triangle_mesh(1 + k % 2)
        v = random_vector_field(rng, 2)
        lhs = G.derive(v).value(E)
        rhs = F.derive(v).value(boundary(E))
        worst = max(worst, abs(lhs - rhs))
    _report(10, "derivative of the boundary rewrite = boundary of the "
                "derivative (12 cases)", worst, 1e-10)


# ---------------------------------------------------------------------------
# criterion 11: rewrites along structure maps
# ---------------------------------------------------------------------------

def test_criterion_11_functoriality_of_rewrites():
    rng = np.random.default_rng(202611)
    worst_emb = 0.0
    worst_exact = 0.0
    for _ in range(10):
        Q, _ = np.linalg.qr(rng.normal(size=(4, 2)))
        emb = AffineEmbedding(Q, rng.normal(0.0, 0.3, size=4))
        v = random_vector_field(rng, 2)
        ext = emb.extend_field(v)
        # measures: values and derivatives factor through the embedding
        F = random_measure_functional(rng, 4, 2)
        mu = random_measure(rng, 2)
        G = embedding_rewrite(emb, F)
        worst_emb = max(worst_emb, _rel(G.value(mu),
                                        F.value(push_measure(emb, mu))))
        worst_emb = max(worst_emb, _rel(
            G.derive(v).value(mu),
            F.derive(ext).value(push_measure(emb, mu))))
        # mappings: the same two checks
        space = random_labeled_space(rng, 3)
        FM = random_mapping_functional(rng, 4, 2, space)
        P = random_mapping_point(rng, 3, 2)
        GM = mapping_embedding_rewrite(emb, FM)
        embedded = MappingPoint(emb.apply(P.values))
        worst_emb = max(worst_emb, _rel(GM.value(P), FM.value(embedded)))
        worst_emb = max(worst_emb, _rel(GM.derive(v).value(P),
                                        FM.derive(ext).value(embedded)))
        # convolution and density rewrites are exact algebra
        F2 = random_measure_functional(rng, 2, 2)
        nu = random_measure(rng, 2)
        worst_exact = max(worst_exact, _rel(
            convolution_rewrite(nu, F2).value(mu),
            F2.value(convolve_measures(mu, nu))))
        dens = random_compact_scalar(rng, 2)
        dens = f_mul(dens, dens)  # nonnegative density
        worst_exact = max(worst_exact, _rel(
            density_rewrite(dens, F2).value(mu),
            F2.value(density_map(dens, mu))))
    ok = worst_emb <= 1e-9 and worst_exact <= 1e-12
    status = "PASS" if ok else "FAIL"
    print(f"[{status}] criterion 11: embedding rewrites commute with values "
          f"and derivatives (worst residual {worst_emb:.3e} vs tolerance "
          f"1.0e-09; exact rewrites {worst_exact:.3e} vs 1.0e-12)")
    assert ok, (f"embedding residual {worst_emb:.3e} (tol 1e-9), exact "
                f"rewrite residual {worst_exact:.3e} (tol 1e-12)")


# ---------------------------------------------------------------------------
# criterion 12: determinism and process exit codes
# ---------------------------------------------------------------------------

def test_criterion_12_determinism_and_exit_codes(tmp_path):
    blob1 = run_suite(SuiteConfig(suite="all")).to_json()
    blob2 = run_suite(SuiteConfig(suite="all")).to_json()
    identical = blob1 == blob2

    def run_cli(*argv):
        return subprocess.run([sys.executable, "-m", "lifted.cli", *argv],
                              capture_output=True, text=True).returncode

    ok_pass = run_cli("verify", "--suite", "mapping-core") == 0
    cfg = tmp_path / "force-fail.json"
    cfg.write_text(json.dumps({
        "suite": "mapping-core",
        "tolerances": {"mapping-core/flow-fd": 0.0}}))
    ok_fail = run_cli("verify", "--config", str(cfg)) == 1
    ok_usage = run_cli("verify", "--suite", "no-such-suite") == 2
    residual = 0.0 if (identical and ok_pass and ok_fail and ok_usage) else 1.0
    _report(12, f"byte-identical reports (identical={identical}) and exit "
                f"codes 0/1/2 ({ok_pass}/{ok_fail}/{ok_usage})",
            residual, 0.0)
