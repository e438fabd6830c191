"""Vector fields, flows, metrics, embeddings."""

import numpy as np
import pytest
from scipy.linalg import expm

from lifted.errors import (InvalidArgumentError, NumericFailureError,
                           UnsupportedOperationError)
from lifted.fields import PolynomialField, monomial
from lifted.smooth import (AffineEmbedding, ConformalMetric, ConstantMetric,
                           VectorField, constant_field, direct_sum_field,
                           directional_derivative, euclidean_metric,
                           field_from_components, flow, lie_bracket,
                           linear_field, metric_gradient, scaled_bump_field)


def _fd_jacobian(v, x, h=1e-6):
    x = np.asarray(x, dtype=float)
    m = x.size
    J = np.zeros((m, m))
    for j in range(m):
        e = np.zeros(m)
        e[j] = h
        J[:, j] = (v.eval(x + e) - v.eval(x - e)) / (2 * h)
    return J


def test_vector_field_requires_matching_components():
    p = PolynomialField(2, {(1, 0): 1.0})
    with pytest.raises(InvalidArgumentError):
        VectorField([p])              # one component for a 2d base
    with pytest.raises(InvalidArgumentError):
        VectorField([p, PolynomialField(3, {(0, 0, 0): 1.0})])


def test_jacobian_and_hessians_match_finite_differences():
    rng = np.random.default_rng(21)
    v = scaled_bump_field([0.2, -0.1], 2.5,
                          [{(1, 0): 0.7, (0, 1): -0.3}, {(0, 2): 0.5}])
    for _ in range(4):
        x = rng.normal(0.0, 0.6, size=2)
        assert np.allclose(v.jacobian(x), _fd_jacobian(v, x), atol=1e-7)
        H = v.component_hessians(x)
        for k in range(2):
            assert np.allclose(H[k], v.components[k].hess(x), atol=1e-12)


def test_field_arithmetic():
    A = np.array([[0.0, 1.0], [-1.0, 0.0]])
    B = np.array([[0.5, 0.0], [0.0, -0.5]])
    v, w = linear_field(A), linear_field(B)
    x = np.array([1.2, -0.4])
    assert np.allclose((v + w).eval(x), A @ x + B @ x)
    assert np.allclose((2.0 * v).eval(x), 2.0 * (A @ x))
    assert (v + w).complete


def test_directional_derivative_is_gradient_pairing():
    rng = np.random.default_rng(23)
    v = scaled_bump_field([0.0, 0.0], 3.0, [{(0, 1): 1.0}, {(1, 0): -1.0}])
    phi = PolynomialField(2, {(2, 0): 1.0, (1, 1): 0.5})
    dphi = directional_derivative(v, phi)
    for _ in range(5):
        x = rng.normal(0.0, 0.8, size=2)
        assert dphi.eval(x) == pytest.approx(float(v.eval(x) @ phi.grad(x)),
                                             abs=1e-12)


def test_lie_bracket_of_linear_fields_is_matrix_commutator():
    rng = np.random.default_rng(25)
    A = rng.normal(0.0, 1.0, size=(3, 3))
    B = rng.normal(0.0, 1.0, size=(3, 3))
    br = lie_bracket(linear_field(A), linear_field(B))
    C = B @ A - A @ B   # components d_v(w_k) - d_w(v_k)
    for _ in range(5):
        x = rng.normal(0.0, 1.0, size=3)
        assert np.allclose(br.eval(x), C @ x, atol=1e-12)


def test_lie_bracket_antisymmetry_and_jacobi():
    rng = np.random.default_rng(27)
    fields = [scaled_bump_field(rng.normal(0.0, 0.4, size=2), 3.0,
                                [dict(zip([(1, 0), (0, 1), (2, 0)],
                                          rng.normal(0.0, 1.0, size=3))),
                                 dict(zip([(0, 1), (1, 1)],
                                          rng.normal(0.0, 1.0, size=2)))])
              for _ in range(3)]
    u, v, w = fields
    x = rng.normal(0.0, 0.5, size=2)
    assert np.allclose(lie_bracket(u, v).eval(x),
                       -lie_bracket(v, u).eval(x), atol=1e-12)
    jac = (lie_bracket(u, lie_bracket(v, w)).eval(x)
           + lie_bracket(v, lie_bracket(w, u)).eval(x)
           + lie_bracket(w, lie_bracket(u, v)).eval(x))
    assert np.allclose(jac, 0.0, atol=1e-11)


def test_flow_of_linear_field_matches_matrix_exponential():
    rng = np.random.default_rng(29)
    A = rng.normal(0.0, 0.8, size=(3, 3))
    v = linear_field(A)
    for t in (0.3, -0.7, 1.0):
        x = rng.normal(0.0, 1.0, size=3)
        assert np.allclose(flow(v, t, x), expm(t * A) @ x, atol=1e-9)


def test_flow_identity_and_composition():
    v = scaled_bump_field([0.0, 0.0], 2.0, [{(0, 1): 1.0}, {(1, 0): -0.5}])
    x = np.array([0.3, -0.2])
    assert np.all(flow(v, 0.0, x) == x)
    once = flow(v, 0.7, flow(v, 0.4, x))
    both = flow(v, 1.1, x)
    assert np.allclose(once, both, atol=1e-10)
    back = flow(v, -0.6, flow(v, 0.6, x))
    assert np.allclose(back, x, atol=1e-10)


def test_flow_fixes_points_outside_support():
    v = scaled_bump_field([0.0, 0.0], 1.0, [{(0, 0): 1.0}, {(0, 0): 1.0}])
    far = np.array([5.0, 5.0])
    assert np.all(flow(v, 2.0, far) == far)


@pytest.mark.filterwarnings("ignore:overflow")
def test_flow_requires_completeness():
    grow = field_from_components([monomial(1, (2,), 1.0)])
    assert not grow.complete
    with pytest.raises(UnsupportedOperationError):
        flow(grow, 1.0, np.array([1.0]))
    forced = field_from_components([monomial(1, (2,), 1.0)], complete=True)
    with pytest.raises(NumericFailureError):
        flow(forced, 5.0, np.array([10.0]))   # blows up in finite time


def test_constant_metric_validation_and_inverse():
    with pytest.raises(InvalidArgumentError):
        ConstantMetric(np.array([[1.0, 0.5], [0.4, 1.0]]))   # not symmetric
    with pytest.raises(NumericFailureError):
        ConstantMetric(np.array([[1.0, 0.0], [0.0, -2.0]]))  # not positive
    G = np.array([[2.0, 0.3], [0.3, 1.0]])
    g = ConstantMetric(G)
    x = np.zeros(2)
    assert np.allclose(g.matrix(x) @ g.inverse(x), np.eye(2), atol=1e-12)
    u, w = np.array([1.0, 2.0]), np.array([-0.5, 1.0])
    assert g.inner(x, u, w) == pytest.approx(float(u @ G @ w), abs=1e-12)


def test_metric_sharp_duality():
    rng = np.random.default_rng(31)
    phi = PolynomialField(2, {(2, 0): 0.5, (0, 1): -1.0, (1, 1): 0.3})
    for g in (euclidean_metric(2),
              ConstantMetric(np.array([[2.0, 0.4], [0.4, 1.5]])),
              ConformalMetric(PolynomialField(2, {(1, 0): 0.2, (0, 1): -0.1}))):
        grad_phi = metric_gradient(phi, g)
        for _ in range(4):
            x = rng.normal(0.0, 0.7, size=2)
            u = rng.normal(0.0, 1.0, size=2)
            # <grad phi, u>_g = d phi(u) for every direction
            assert g.inner(x, grad_phi.eval(x), u) == pytest.approx(
                float(phi.grad(x) @ u), abs=1e-10)


def test_conformal_metric_matrix():
    lam = PolynomialField(2, {(1, 0): 0.3})
    g = ConformalMetric(lam)
    x = np.array([0.5, -1.0])
    s = np.exp(2.0 * lam.eval(x))
    assert np.allclose(g.matrix(x), s * np.eye(2), atol=1e-12)
    assert np.allclose(g.inverse(x), np.eye(2) / s, atol=1e-12)


def test_affine_embedding_roundtrip_and_validation():
    with pytest.raises(InvalidArgumentError):
        AffineEmbedding(np.array([[1.0, 0.0], [0.0, 2.0], [0.0, 0.0]]))
    Q, _ = np.linalg.qr(np.random.default_rng(33).normal(size=(4, 2)))
    b = np.array([0.1, -0.2, 0.3, 0.0])
    emb = AffineEmbedding(Q, b)
    x = np.array([0.7, -0.4])
    assert np.allclose(emb.left_inverse(emb.apply(x)), x, atol=1e-12)
    phi = PolynomialField(4, {(1, 0, 0, 0): 1.0, (0, 0, 2, 0): 0.5})
    pulled = emb.pullback_scalar(phi)
    assert pulled.eval(x) == pytest.approx(phi.eval(emb.apply(x)), abs=1e-12)


def test_extend_field_restricts_to_pushforward_on_image():
    rng = np.random.default_rng(35)
    Q, _ = np.linalg.qr(rng.normal(size=(3, 2)))
    b = np.array([0.2, 0.0, -0.1])
    emb = AffineEmbedding(Q, b)
    v = scaled_bump_field([0.0, 0.0], 2.0, [{(0, 1): 1.0}, {(1, 0): 1.0}])
    ext = emb.extend_field(v)
    for _ in range(5):
        x = rng.normal(0.0, 0.6, size=2)
        # on the image the extension is exactly the pushed-forward field
        assert np.allclose(ext.eval(emb.apply(x)), Q @ v.eval(x), atol=1e-12)
    # far from the image the mask kills it
    far = b + 5.0 * np.array([1.0, 1.0, 1.0])
    assert np.allclose(ext.eval(far), 0.0, atol=1e-15)


def test_direct_sum_field_acts_blockwise():
    v = scaled_bump_field([0.0, 0.0], 2.0, [{(1, 0): 1.0}, {(0, 1): -1.0}])
    big = direct_sum_field(v, 3)
    x = np.array([0.1, 0.2, -0.3, 0.4, 0.5, -0.6])
    want = np.concatenate([v.eval(x[0:2]), v.eval(x[2:4]), v.eval(x[4:6])])
    assert np.allclose(big.eval(x), want, atol=1e-14)


def test_constant_field_flow_is_translation():
    v = constant_field([1.0, -2.0])
    x = np.array([0.0, 0.0])
    assert np.allclose(flow(v, 0.5, x), [0.5, -1.0], atol=1e-12)
