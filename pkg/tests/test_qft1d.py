import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from modgauss.qft1d import (
    REFERENCE_ENTROPY,
    DiscretizationError,
    DottedConstraintError,
    SpectralGrid,
    SupportError,
    WavePacket,
    apply_iota_m,
    apply_mu,
    corpus_profiles,
    cut_to_interval,
    entropy_closed_form,
    entropy_modular_route,
    entropy_modular_route_detail,
    entropy_report,
    modular_K0_apply,
    packet_corpus,
    packet_from_functions,
    read_packet_csv,
    real_scalar_product,
    reference_packet,
    sobolev_norm,
    symplectic_form,
    write_packet_csv,
)


@pytest.fixture(scope="module")
def grid():
    return SpectralGrid(4096, 8.0)


def mode(grid, j):
    """cos(k0 x) with k0 the j-th grid wavenumber, exactly periodic on the box."""
    k0 = np.pi * j / grid.box_half_length
    return k0, np.cos(k0 * grid.x)


def asymmetric_pair(grid):
    p = packet_from_functions(grid, lambda y: (1 - y**2) ** 2 * np.cos(2 * y + 0.3), lambda y: (y + 0.4) * (1 - y**2) ** 2)
    q = packet_from_functions(grid, lambda y: y * (1 - y**2) ** 3, lambda y: np.sin(3 * y + 1) * (1 - y**2) ** 2)
    return p, q


# ------------------------------------------------------------ Sobolev norms


def test_half_norm_of_single_mode(grid):
    k0, u = mode(grid, 12)
    l2 = grid.integrate(u * u)
    assert sobolev_norm(u, 0.5, 0.0, grid) == pytest.approx(k0 * l2, rel=1e-12)


def test_mu_on_single_mode(grid):
    k0, u = mode(grid, 7)
    np.testing.assert_allclose(apply_mu(u, 1.0, grid), np.sqrt(k0**2 + 1) * u, atol=1e-12)


def test_mu_exchanges_sobolev_norms(grid):
    p, _ = asymmetric_pair(grid)
    a = sobolev_norm(p.f, 0.5, 1.0, grid)
    b = sobolev_norm(apply_mu(p.f, 1.0, grid), -0.5, 1.0, grid)
    assert a == pytest.approx(b, rel=1e-10)


def test_dotted_norm_converges(grid):
    coarse = reference_packet(SpectralGrid(2048, 8.0))
    fine = reference_packet(grid)
    a = sobolev_norm(coarse.g, -0.5, 0.0, coarse.grid)
    b = sobolev_norm(fine.g, -0.5, 0.0, fine.grid)
    assert np.isfinite(a) and abs(a / b - 1) < 1e-3


def test_dotted_constraint_enforced(grid):
    bump_g = np.where(np.abs(grid.x) < 1, (1 - grid.x**2) ** 2, 0.0)
    with pytest.raises(DottedConstraintError):
        sobolev_norm(bump_g, -0.5, 0.0, grid)
    with pytest.raises(DottedConstraintError):
        apply_iota_m(WavePacket(0 * bump_g, bump_g, grid), 0.0)
    # massive norms do not need the constraint
    assert sobolev_norm(bump_g, -0.5, 1.0, grid) > 0


def test_sobolev_rejects_bad_index(grid):
    with pytest.raises(ValueError):
        sobolev_norm(np.zeros(grid.n_points), 1.0, 0.0, grid)


# ------------------------------------------------------------ complex structure


def test_iota_squares_to_minus_one_massive(grid):
    p, _ = asymmetric_pair(grid)
    twice = apply_iota_m(apply_iota_m(p, 1.0), 1.0)
    assert twice.residual(p.scale(-1.0)) <= 1e-12


def test_iota_massless_up_to_zero_mode(grid):
    p, _ = asymmetric_pair(grid)
    twice = apply_iota_m(apply_iota_m(p, 0.0), 0.0)
    # only the k = 0 mode of f is lost
    np.testing.assert_allclose(twice.f, -(p.f - p.f.mean()), atol=1e-12)
    np.testing.assert_allclose(twice.g, -p.g, atol=1e-12)


@pytest.mark.parametrize("m", [0.0, 1.0])
def test_symplectic_form_is_imaginary_part(grid, m):
    # antilinear first slot: Im(x, y) = -Re(x, i y)
    p, q = asymmetric_pair(grid)
    assert symplectic_form(p, q) == pytest.approx(-real_scalar_product(p, apply_iota_m(q, m), m), rel=1e-10)
    assert abs(symplectic_form(p, q)) > 1e-3


@pytest.mark.parametrize("m", [0.0, 1.0])
def test_iota_is_isometry(grid, m):
    p, _ = asymmetric_pair(grid)
    assert real_scalar_product(apply_iota_m(p, m), apply_iota_m(p, m), m) == pytest.approx(
        real_scalar_product(p, p, m), rel=1e-10
    )


# ------------------------------------------------------------ cutting and M


def test_cut_removes_outside_mass(grid):
    straddle = WavePacket(np.exp(-4 * (grid.x - 1) ** 2), np.zeros(grid.n_points), grid)
    cut = cut_to_interval(straddle)
    assert np.all(cut.f[np.abs(grid.x) >= 1] == 0)
    assert grid.integrate(cut.f**2) < grid.integrate(straddle.f**2)


def test_M_against_symbolic_derivative(grid):
    x = grid.x
    phi = packet_from_functions(grid, lambda y: (1 - y**2) ** 2, lambda y: 0 * y)
    out = modular_K0_apply(phi)
    exact = np.where(np.abs(x) < 1, 0.5 * (1 - x**2) * (12 * x**2 - 4) - x * (-4 * x * (1 - x**2)), 0.0)
    # f'' jumps at ±1; the five-point stencil is exact to O(h^4) only four cells away from the kink
    away = np.abs(np.abs(x) - 1) > 4 * grid.dx
    assert np.max(np.abs(out.g - exact)[away]) <= 1e-6
    np.testing.assert_allclose(out.f, 0, atol=0)


def test_M_first_component(grid):
    phi = reference_packet(grid)
    out = modular_K0_apply(phi)
    c = np.where(np.abs(grid.x) < 1, (1 - grid.x**2) / 2, 0.0)
    np.testing.assert_allclose(out.f, c * phi.g, atol=1e-15)


def test_M_is_symplectic_generator(grid):
    p, q = asymmetric_pair(grid)
    lhs = symplectic_form(p, modular_K0_apply(q)) + symplectic_form(modular_K0_apply(p), q)
    assert abs(lhs) <= 1e-8 * abs(symplectic_form(p, modular_K0_apply(q)))


def test_M_requires_support(grid):
    wide = WavePacket(np.exp(-grid.x**2), np.zeros(grid.n_points), grid)
    with pytest.raises(SupportError):
        modular_K0_apply(wide)


# ------------------------------------------------------------ entropy


def test_reference_value_by_quadrature():
    val, _ = quad(lambda x: x**2 * (1 - x**2) ** 5, -1, 1, epsabs=1e-14)
    assert val == pytest.approx(512 / 9009, rel=1e-12)
    assert np.pi / 2 * val == pytest.approx(REFERENCE_ENTROPY, rel=1e-12)


def test_reference_closed_form(grid):
    assert entropy_closed_form(reference_packet(grid)) == pytest.approx(REFERENCE_ENTROPY, rel=1e-3)


def test_f_only_closed_form(grid):
    phi = packet_from_functions(grid, lambda y: (1 - y**2) ** 2, lambda y: 0 * y)
    oracle, _ = quad(lambda x: np.pi * (1 - x**2) * 16 * x**2 * (1 - x**2) ** 2 / 2, -1, 1)
    assert entropy_closed_form(phi) == pytest.approx(oracle, rel=1e-4)


def test_routes_agree_on_reference(grid):
    assert entropy_modular_route(reference_packet(grid)) == pytest.approx(REFERENCE_ENTROPY, rel=0.01)


def test_raw_pairing_sign(grid):
    detail = entropy_modular_route_detail(reference_packet(grid))
    assert detail.raw_pairing == pytest.approx(-detail.value)
    assert detail.value > 0


def test_corpus_routes_agree(grid):
    corpus = packet_corpus(grid)
    assert len(corpus) == 10
    for phi in corpus:
        r = entropy_report(phi)
        assert r["relative_gap"] <= 0.01
        assert r["closed_form"] > 0


def test_route_gap_converges_at_second_order():
    profile = corpus_profiles()[1]
    gaps = [entropy_report(packet_from_functions(SpectralGrid(n, 8.0), *profile))["relative_gap"] for n in (128, 256, 512)]
    assert gaps[0] / gaps[1] == pytest.approx(4, rel=0.1)
    assert gaps[1] / gaps[2] == pytest.approx(4, rel=0.1)


def test_coarse_grid_raises():
    phi = packet_from_functions(SpectralGrid(32, 8.0), *corpus_profiles()[1])
    with pytest.raises(DiscretizationError, match="increase n_points"):
        entropy_modular_route(phi)


@given(st.floats(0.1, 10.0), st.integers(0, 9))
def test_entropy_is_quadratic(c, k):
    grid = SpectralGrid(1024, 8.0)
    phi = packet_from_functions(grid, *corpus_profiles()[k])
    assert entropy_closed_form(phi.scale(c)) == pytest.approx(c * c * entropy_closed_form(phi), rel=1e-12)


@pytest.mark.parametrize("center, half_width", [(0.5, 2.0), (-1.0, 0.5), (2.0, 1.0)])
def test_entropy_covariant_under_affine_maps(grid, center, half_width):
    for f, g in corpus_profiles()[:4]:
        base = entropy_closed_form(packet_from_functions(grid, f, g))
        moved = packet_from_functions(grid, f, g, center, half_width)
        assert entropy_closed_form(moved, center, half_width) == pytest.approx(base, rel=5e-3)
        assert entropy_modular_route(moved, center, half_width) == pytest.approx(base, rel=1e-2)


def test_csv_roundtrip():
    grid = SpectralGrid(256, 4.0)
    phi = reference_packet(grid)
    back = read_packet_csv(write_packet_csv(phi))
    assert back.grid == grid
    np.testing.assert_array_equal(back.g, phi.g)


def test_csv_rejects_bad_header():
    with pytest.raises(ValueError):
        read_packet_csv("a,b,c\n1,2,3\n")
