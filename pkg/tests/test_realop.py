import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from modgauss.realop import (
    RealifiedSpace,
    anticommutator_with_i,
    borel_calculus_real,
    commutator_with_i,
    hs_norm,
    is_antilinear,
    is_complex_linear,
    polar_decompose,
    polariser_calculus,
    psd_sqrt,
    random_symplectic,
    real_adjoint,
    schatten_norm,
    shale_identity_residual,
    skew_canonical_form,
    standard_complex_structure,
)

seeds = st.integers(0, 2**32 - 1)


def complex_to_real(m: np.ndarray) -> np.ndarray:
    """C^N matrix acting on (Re, Im) coordinates."""
    return np.block([[m.real, -m.imag], [m.imag, m.real]])


def test_complex_structure_squares_to_minus_one():
    i_op = standard_complex_structure(3)
    np.testing.assert_allclose(i_op @ i_op, -np.eye(6), atol=1e-15)
    np.testing.assert_allclose(i_op.T @ i_op, np.eye(6), atol=1e-15)


def test_space_rejects_non_complex_structure():
    with pytest.raises(ValueError):
        RealifiedSpace(np.eye(4))


def test_alpha_beta_match_complex_scalar_product(rng):
    space = RealifiedSpace.standard(3)
    x, y = rng.standard_normal(6), rng.standard_normal(6)
    zx, zy = x[:3] + 1j * x[3:], y[:3] + 1j * y[3:]
    inner = np.vdot(zx, zy)  # antilinear in the first slot
    assert space.alpha(x, y) == pytest.approx(inner.real, abs=1e-13)
    assert space.beta(x, y) == pytest.approx(inner.imag, abs=1e-13)


def test_real_adjoint_inner_product_oracle():
    rng = np.random.default_rng(0)
    t = rng.standard_normal((8, 8))
    ta = real_adjoint(t)
    for _ in range(100):
        x, y = rng.standard_normal(8), rng.standard_normal(8)
        assert abs((t @ x) @ y - x @ (ta @ y)) <= 1e-12


def test_polar_of_skew_rotation_generator():
    t = 0.5 * np.array([[0.0, 1.0], [-1.0, 0.0]])
    v, p = polar_decompose(t)
    np.testing.assert_allclose(v @ v, -np.eye(2), atol=1e-14)
    np.testing.assert_allclose(v @ p, p @ v, atol=1e-14)
    np.testing.assert_allclose(v @ p, t, atol=1e-14)


@given(seeds)
def test_polar_factors(seed):
    rng = np.random.default_rng(seed)
    t = rng.standard_normal((6, 6))
    v, p = polar_decompose(t)
    np.testing.assert_allclose(v @ p, t, atol=1e-11)
    np.testing.assert_allclose(v.T @ v, np.eye(6), atol=1e-10)
    np.testing.assert_allclose(p, p.T, atol=1e-12)
    assert np.linalg.eigvalsh(p).min() >= -1e-12


def test_hs_norm_is_frobenius():
    t = np.random.default_rng(1).standard_normal((6, 6))
    assert hs_norm(t) == pytest.approx(np.sqrt(np.sum(t**2)), abs=1e-12)
    assert schatten_norm(t, 2) == pytest.approx(np.linalg.norm(t), abs=1e-12)


def test_schatten_norm_ordering_and_index_check():
    t = np.random.default_rng(2).standard_normal((5, 5))
    assert schatten_norm(t, 1) >= schatten_norm(t, 2) >= schatten_norm(t, np.inf)
    with pytest.raises(ValueError):
        schatten_norm(t, 0.5)


def test_realified_complex_matrix_norm_is_sqrt2_times_complex_hs():
    rng = np.random.default_rng(3)
    m = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    assert hs_norm(complex_to_real(m)) == pytest.approx(np.sqrt(2) * np.linalg.norm(m), rel=1e-13)


def test_linearity_predicates():
    rng = np.random.default_rng(4)
    i_op = standard_complex_structure(2)
    lin = complex_to_real(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
    conj = np.diag([1.0, 1.0, -1.0, -1.0])
    assert is_complex_linear(lin, i_op)
    assert not is_antilinear(lin, i_op)
    assert is_antilinear(conj, i_op)
    assert np.linalg.norm(commutator_with_i(lin, i_op)) < 1e-13
    assert np.linalg.norm(anticommutator_with_i(conj, i_op)) < 1e-13


def test_squeeze_shale_identity_closed_form():
    t = np.diag([2.0, 0.5])
    assert shale_identity_residual(t, standard_complex_structure(1)) <= 1e-12


@given(seeds)
def test_random_symplectic_preserves_form(seed):
    rng = np.random.default_rng(seed)
    i_op = standard_complex_structure(3)
    t = random_symplectic(i_op, rng)
    np.testing.assert_allclose(t.T @ i_op @ t, i_op, atol=1e-10)
    assert shale_identity_residual(t, i_op) <= 1e-10


def test_psd_sqrt():
    a = np.random.default_rng(5).standard_normal((4, 4))
    a = a @ a.T + np.eye(4)
    r = psd_sqrt(a)
    np.testing.assert_allclose(r @ r, a, atol=1e-12)


def test_borel_tanh_on_b_half_generator():
    # -iota K has eigenvalues ±log 3 and tanh(log 3 / 2) = 1/2, so i tanh(./2) maps K to K/2 / log 3
    k = np.array([[0.0, 1.0], [-1.0, 0.0]]) * np.log(3.0)
    out = borel_calculus_real(k, lambda t: 1j * np.tanh(t / 2))
    np.testing.assert_allclose(out, k * (0.5 / np.log(3.0)), atol=1e-14)


@given(seeds)
def test_borel_sech_identity(seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((6, 6))
    k = x - x.T
    sech = borel_calculus_real(k, lambda t: 1 / np.cosh(t / 2))
    cosh = borel_calculus_real(k, lambda t: np.cosh(t / 2))
    np.testing.assert_allclose(sech, sech.T, atol=1e-12)
    np.testing.assert_allclose(sech @ k, k @ sech, atol=1e-10)
    np.testing.assert_allclose(sech @ sech @ cosh @ cosh, np.eye(6), atol=1e-10)


def test_borel_identity_function_returns_generator():
    # f(t) = i t applied to A = -iota K gives back K
    k = np.random.default_rng(6).standard_normal((4, 4))
    k = k - k.T
    np.testing.assert_allclose(borel_calculus_real(k, lambda t: 1j * t), k, atol=1e-12)


def test_borel_rejects_non_skew():
    with pytest.raises(ValueError):
        borel_calculus_real(np.eye(2), np.tanh)


def test_borel_rejects_non_real_result():
    k = np.array([[0.0, 1.0], [-1.0, 0.0]])
    with pytest.raises(ValueError):
        borel_calculus_real(k, lambda t: (t > 0).astype(float))


def test_polariser_calculus_recovers_polariser():
    d = 0.5 * np.array([[0.0, 1.0], [-1.0, 0.0]])
    np.testing.assert_allclose(polariser_calculus(d, lambda t: 1j * np.tanh(t / 2)), d, atol=1e-14)


@given(seeds)
def test_skew_canonical_form(seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((6, 6))
    d = 0.3 * (x - x.T)
    o, sigma = skew_canonical_form(d)
    np.testing.assert_allclose(o.T @ o, np.eye(6), atol=1e-12)
    blocks = o.T @ d @ o
    expected = np.zeros((6, 6))
    for j, s in enumerate(sigma):
        expected[2 * j, 2 * j + 1], expected[2 * j + 1, 2 * j] = s, -s
    np.testing.assert_allclose(blocks, expected, atol=1e-12)
    assert np.all(sigma >= 0)
