"""Coefficient differential forms: exterior calculus against FD oracles."""

import numpy as np
import pytest

from lifted.errors import InvalidArgumentError
from lifted.fields import BumpField, PolynomialField, constant, f_mul
from lifted.forms import (DifferentialForm, coordinate_form,
                          exterior_derivative, form_from_coeffs,
                          interior_product, lie_derivative_form, wedge_ambient)
from lifted.smooth import flow, scaled_bump_field


def _poly(dim, terms):
    return PolynomialField(dim, terms)


def _random_form(rng, dim, degree, bump=False):
    from itertools import combinations
    coeffs = {}
    for I in combinations(range(dim), degree):
        c = _poly(dim, {tuple(rng.integers(0, 2, size=dim)): rng.normal()
                        for _ in range(2)})
        if bump:
            c = f_mul(c, BumpField(np.zeros(dim), 3.0))
        coeffs[I] = c
    return DifferentialForm(dim, degree, coeffs)


def _d_oracle(omega, x, vectors, h=1e-6):
    """d omega on constant vectors: sum_i (-1)^i D_{v_i} [omega(.., v_i hat, ..)]."""
    x = np.asarray(x, dtype=float)
    total = 0.0
    for i, u in enumerate(vectors):
        rest = vectors[:i] + vectors[i + 1:]
        plus = omega.eval(x + h * np.asarray(u), rest)
        minus = omega.eval(x - h * np.asarray(u), rest)
        total += (-1.0) ** i * (plus - minus) / (2 * h)
    return total


def test_eval_is_alternating():
    rng = np.random.default_rng(41)
    omega = _random_form(rng, 4, 2)
    for _ in range(5):
        x = rng.normal(0.0, 1.0, size=4)
        u, w = rng.normal(0.0, 1.0, size=4), rng.normal(0.0, 1.0, size=4)
        a = omega.eval(x, [u, w])
        b = omega.eval(x, [w, u])
        scale = 1.0 + max(abs(a), abs(b))
        assert abs(a + b) / scale <= 1e-12
        assert abs(omega.eval(x, [u, u])) / scale <= 1e-12


def test_eval_batch_matches_pointwise():
    rng = np.random.default_rng(43)
    omega = _random_form(rng, 3, 2)
    X = rng.normal(0.0, 1.0, size=(6, 3))
    u, w = rng.normal(size=3), rng.normal(size=3)
    batch = omega.eval(X, [u, w])
    assert np.allclose(batch, [omega.eval(x, [u, w]) for x in X], atol=1e-13)


def test_missing_coefficient_is_zero_field():
    omega = coordinate_form(3, (0, 1))
    z = omega.coefficient((0, 2))
    assert z.eval(np.ones(3)) == 0.0
    assert omega.coefficient((0, 1)).eval(np.ones(3)) == 1.0


@pytest.mark.parametrize("dim,degree", [(2, 0), (3, 1), (4, 2)])
def test_exterior_derivative_matches_fd_oracle(dim, degree):
    rng = np.random.default_rng(45 + dim)
    omega = _random_form(rng, dim, degree, bump=True)
    dom = exterior_derivative(omega)
    assert dom.degree == degree + 1
    for _ in range(4):
        x = rng.normal(0.0, 0.7, size=dim)
        vecs = [rng.normal(0.0, 1.0, size=dim) for _ in range(degree + 1)]
        want = _d_oracle(omega, x, vecs)
        assert dom.eval(x, vecs) == pytest.approx(want, abs=2e-7)


def test_exterior_derivative_squares_to_zero():
    rng = np.random.default_rng(47)
    for bump in (False, True):
        omega = _random_form(rng, 4, 1, bump=bump)
        dd = exterior_derivative(exterior_derivative(omega))
        for _ in range(4):
            x = rng.normal(0.0, 0.7, size=4)
            vecs = [rng.normal(0.0, 1.0, size=4) for _ in range(3)]
            assert abs(dd.eval(x, vecs)) <= 1e-11


def test_exterior_derivative_rejects_top_degree():
    omega = coordinate_form(2, (0, 1))
    with pytest.raises(InvalidArgumentError):
        exterior_derivative(omega)


def test_interior_product_contracts_first_slot():
    rng = np.random.default_rng(49)
    omega = _random_form(rng, 3, 2)
    v = scaled_bump_field([0.0, 0.0, 0.0], 3.0,
                          [{(1, 0, 0): 1.0}, {(0, 0, 1): -0.5}, {(0, 1, 0): 0.3}])
    ivo = interior_product(v, omega)
    assert ivo.degree == 1
    for _ in range(5):
        x = rng.normal(0.0, 0.6, size=3)
        u = rng.normal(0.0, 1.0, size=3)
        assert ivo.eval(x, [u]) == pytest.approx(
            omega.eval(x, [v.eval(x), u]), abs=1e-12)
    twice = interior_product(v, ivo)
    for _ in range(3):
        x = rng.normal(0.0, 0.6, size=3)
        assert abs(twice.eval(x, [])) <= 1e-12


def test_interior_product_of_scalar_form_is_zero():
    v = scaled_bump_field([0.0, 0.0], 2.0, [{(0, 0): 1.0}, {(0, 0): 1.0}])
    f = form_from_coeffs(2, 0, {(): _poly(2, {(1, 0): 1.0})})
    out = interior_product(v, f)
    assert out.degree == 0
    assert out.eval(np.array([0.3, 0.4]), []) == 0.0


def test_lie_derivative_matches_flow_pullback():
    rng = np.random.default_rng(51)
    v = scaled_bump_field([0.0, 0.0, 0.0], 2.5,
                          [{(0, 1, 0): 0.8}, {(1, 0, 0): -0.6}, {(0, 0, 2): 0.3}])
    omega = _random_form(rng, 3, 2, bump=True)
    lie = lie_derivative_form(v, omega)

    def pullback(t, x, vectors, eps=1e-4):
        y = flow(v, t, x)
        imgs = [(flow(v, t, x + eps * u) - flow(v, t, x - eps * u)) / (2 * eps)
                for u in vectors]
        return omega.eval(y, imgs)

    for _ in range(3):
        x = rng.normal(0.0, 0.5, size=3)
        vecs = [rng.normal(0.0, 1.0, size=3) for _ in range(2)]
        t = 1e-3
        want = (pullback(t, x, vecs) - pullback(-t, x, vecs)) / (2 * t)
        assert lie.eval(x, vecs) == pytest.approx(want, abs=1e-4)


def test_lie_derivative_of_scalar_is_directional():
    v = scaled_bump_field([0.0, 0.0], 3.0, [{(0, 1): 1.0}, {(1, 0): 1.0}])
    f = form_from_coeffs(2, 0, {(): _poly(2, {(2, 0): 1.0, (0, 1): 0.5})})
    lie = lie_derivative_form(v, f)
    rng = np.random.default_rng(53)
    for _ in range(4):
        x = rng.normal(0.0, 0.5, size=2)
        phi = f.coefficient(())
        assert lie.eval(x, []) == pytest.approx(
            float(v.eval(x) @ phi.grad(x)), abs=1e-12)


def test_wedge_of_one_forms_is_antisymmetric_pairing():
    rng = np.random.default_rng(55)
    alpha = _random_form(rng, 3, 1)
    beta = _random_form(rng, 3, 1)
    w = wedge_ambient(alpha, beta)
    for _ in range(4):
        x = rng.normal(0.0, 0.8, size=3)
        u, t = rng.normal(size=3), rng.normal(size=3)
        want = (alpha.eval(x, [u]) * beta.eval(x, [t])
                - alpha.eval(x, [t]) * beta.eval(x, [u]))
        assert w.eval(x, [u, t]) == pytest.approx(want, abs=1e-12)


def test_wedge_graded_commutativity():
    rng = np.random.default_rng(57)
    a1 = _random_form(rng, 4, 1)
    b1 = _random_form(rng, 4, 1)
    b2 = _random_form(rng, 4, 2)
    x = rng.normal(0.0, 0.8, size=4)
    vecs2 = [rng.normal(size=4) for _ in range(2)]
    vecs3 = [rng.normal(size=4) for _ in range(3)]
    # odd * odd anticommutes, odd * even commutes
    assert wedge_ambient(a1, b1).eval(x, vecs2) == pytest.approx(
        -wedge_ambient(b1, a1).eval(x, vecs2), abs=1e-12)
    assert wedge_ambient(a1, b2).eval(x, vecs3) == pytest.approx(
        wedge_ambient(b2, a1).eval(x, vecs3), abs=1e-12)


def test_wedge_with_scalar_form_multiplies():
    f = form_from_coeffs(2, 0, {(): _poly(2, {(1, 0): 2.0})})
    omega = coordinate_form(2, (1,), _poly(2, {(0, 1): 1.0}))
    w = wedge_ambient(f, omega)
    x = np.array([0.5, -1.0])
    u = np.array([0.0, 1.0])
    assert w.eval(x, [u]) == pytest.approx(
        f.eval(x, []) * omega.eval(x, [u]), abs=1e-13)


def test_wedge_rejects_degree_overflow():
    a = coordinate_form(2, (0, 1))
    b = coordinate_form(2, (0,))
    with pytest.raises(InvalidArgumentError):
        wedge_ambient(a, b)


def test_form_validation():
    c = constant(3, 1.0)
    with pytest.raises(InvalidArgumentError):
        DifferentialForm(3, 2, {(1, 0): c})       # not increasing
    with pytest.raises(InvalidArgumentError):
        DifferentialForm(3, 2, {(1, 1): c})       # repeated index
    with pytest.raises(InvalidArgumentError):
        DifferentialForm(3, 2, {(1, 3): c})       # out of range
    with pytest.raises(InvalidArgumentError):
        DifferentialForm(3, 2, {(0,): c})         # wrong length
    with pytest.raises(InvalidArgumentError):
        DifferentialForm(3, 4, {})                # degree > dim
    with pytest.raises(InvalidArgumentError):
        DifferentialForm(3, 1, {(0,): constant(2, 1.0)})
    omega = coordinate_form(3, (0,))
    with pytest.raises(InvalidArgumentError):
        omega.eval(np.zeros(3), [])               # needs one vector
    with pytest.raises(InvalidArgumentError):
        omega + coordinate_form(3, (0, 1))
