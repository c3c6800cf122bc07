import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from modgauss.dilation import random_factorial_subspace
from modgauss.realop import RealifiedSpace, psd_sqrt
from modgauss.reports import ConsistencyError
from modgauss.stdspace import (
    CuttingSingularityError,
    NotFactorialError,
    NotStandardError,
    block_formula_checks,
    complement,
    cutting_P,
    cutting_P_direct,
    modular_checks,
    polariser_embedded,
    projection_E,
    projection_E_formula,
    projection_checks,
    standard_subspace_from_basis,
    symplectic_blocks,
    type_one_trace,
)

seeds = st.integers(0, 2**32 - 1)


def real_part_subspace(n: int):
    """R^n inside C^n: standard, but S is complex conjugation and Delta = 1."""
    space = RealifiedSpace.standard(n)
    return standard_subspace_from_basis(space, np.eye(2 * n)[:, :n])


def assert_all_pass(checks):
    bad = [c for c in checks if not c.passed]
    assert not bad, bad


def test_real_part_subspace_is_standard_not_factorial():
    h = real_part_subspace(3)
    assert not h.factorial
    np.testing.assert_allclose(h.modular.Delta, np.eye(6), atol=1e-14)
    np.testing.assert_allclose(h.modular.J, np.diag([1.0] * 3 + [-1.0] * 3), atol=1e-14)
    with pytest.raises(CuttingSingularityError):
        cutting_P(h)
    with pytest.raises(NotFactorialError):
        symplectic_blocks(np.eye(6), h)


def test_rejects_non_separating():
    space = RealifiedSpace.standard(2)
    v = np.column_stack([np.eye(4)[:, 0], space.i_op @ np.eye(4)[:, 0]])
    with pytest.raises(NotStandardError, match="separating"):
        standard_subspace_from_basis(space, v)


def test_rejects_non_cyclic():
    space = RealifiedSpace.standard(2)
    with pytest.raises(NotStandardError, match="cyclic"):
        standard_subspace_from_basis(space, np.eye(4)[:, :1])


def test_b_half_modular_spectrum(b_half_subspace):
    h = b_half_subspace
    assert h.factorial
    # tanh(L/2) = ∓i D with eigenvalues ±1/2, so Delta = (1 + b)/(1 - b) and its inverse
    np.testing.assert_allclose(np.sort(h.modular.delta_spectrum), [1 / 3, 1 / 3, 3, 3], atol=1e-12)


def test_b_half_polariser_closed_forms(b_half_subspace):
    h = b_half_subspace
    d = h.polariser
    np.testing.assert_allclose(d @ d, -0.25 * np.eye(2), atol=1e-12)
    e_hp = h.modular.J @ h.E @ h.modular.J
    np.testing.assert_allclose(h.restrict(h.E @ e_hp), 0.75 * np.eye(2), atol=1e-12)
    assert type_one_trace(h) == pytest.approx(1.5, abs=1e-12)


def test_b_half_projection_routes(b_half_subspace):
    h = b_half_subspace
    assert np.linalg.norm(h.E - projection_E_formula(h)) <= 1e-10
    cutting_P(h, tol=1e-8)


def test_jdeltaj_seeded_n8():
    h = random_factorial_subspace(8, np.random.default_rng(1))
    md = h.modular
    assert np.linalg.norm(md.J @ md.Delta @ md.J - np.linalg.inv(md.Delta)) <= 1e-9


def test_projector_axioms_n16():
    h = random_factorial_subspace(16, np.random.default_rng(7))
    e = projection_E(h)
    assert np.linalg.norm(e @ e - e) <= 1e-10
    assert np.linalg.norm(e - e.T) <= 1e-10
    assert np.linalg.norm(e @ h.basis - h.basis) <= 1e-10


def test_projection_E_detects_inconsistency(b_half_subspace):
    h = b_half_subspace
    h.__dict__["E"] = np.eye(4)  # corrupt the Gram route
    with pytest.raises(ConsistencyError):
        projection_E(h)


def test_complement_is_symplectic_complement(b_half_subspace):
    h = b_half_subspace
    hp = complement(h)
    # beta(H, H') = 0
    assert np.linalg.norm(h.basis.T @ h.i_op @ hp.basis) <= 1e-12
    # P_H + P_H' = 1
    p, pp = cutting_P_direct(h), cutting_P_direct(hp)
    np.testing.assert_allclose(p + pp, np.eye(4), atol=1e-12)
    # H'' = H
    np.testing.assert_allclose(complement(hp).E, h.E, atol=1e-12)


def test_i_blocks_on_b_half(b_half_subspace):
    h = b_half_subspace
    d = h.polariser
    d_inv = np.linalg.inv(d)
    ds = d_inv @ psd_sqrt(np.eye(2) + d @ d)
    blocks = symplectic_blocks(h.i_op, h)
    np.testing.assert_allclose(blocks["11"], d_inv, atol=1e-10)
    np.testing.assert_allclose(blocks["12"], ds, atol=1e-10)
    np.testing.assert_allclose(blocks["21"], -ds, atol=1e-10)
    np.testing.assert_allclose(blocks["22"], -d_inv, atol=1e-10)


def test_E_blocks_on_b_half(b_half_subspace):
    h = b_half_subspace
    d = h.polariser
    blocks = symplectic_blocks(h.E, h)
    np.testing.assert_allclose(blocks["11"], np.eye(2), atol=1e-10)
    np.testing.assert_allclose(blocks["12"], psd_sqrt(np.eye(2) + d @ d), atol=1e-10)
    np.testing.assert_allclose(blocks["21"], 0, atol=1e-10)
    np.testing.assert_allclose(blocks["22"], 0, atol=1e-10)


@given(seeds, st.sampled_from([2, 4, 8]))
def test_modular_and_polariser_identities(seed, n):
    h = random_factorial_subspace(n, np.random.default_rng(seed))
    assert_all_pass(modular_checks(h, 1e-9))
    _, checks = polariser_embedded(h, 1e-9)
    assert_all_pass(checks)
    assert_all_pass(projection_checks(h, 1e-9))
    assert_all_pass(block_formula_checks(h, 1e-8))


@given(seeds)
def test_modular_flow_preserves_subspace(seed):
    h = random_factorial_subspace(4, np.random.default_rng(seed))
    for s in (-1.3, 0.4, 5.0):
        u = h.modular.delta_it(s)
        np.testing.assert_allclose(u.T @ u, np.eye(8), atol=1e-10)
        np.testing.assert_allclose(h.E @ u @ h.basis, u @ h.basis, atol=1e-10)


@given(seeds)
def test_polariser_is_contraction(seed):
    h = random_factorial_subspace(6, np.random.default_rng(seed))
    d = h.polariser
    np.testing.assert_allclose(d.T, -d, atol=1e-14)
    assert np.linalg.norm(d, 2) <= 1 + 1e-12


def test_non_factorial_skips_inverse_identities():
    _, checks = polariser_embedded(real_part_subspace(2))
    skipped = [c for c in checks if "skipped" in c.identity_name]
    assert len(skipped) == 3
    assert all(np.isnan(c.residual) for c in skipped)
