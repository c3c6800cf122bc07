import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from modgauss.helmholtz import (
    FormOrderError,
    LineOperator,
    ResolutionError,
    ba_identity_residual,
    dirichlet_extension,
    extension_Am,
    form_order_check,
    krein_extension,
    lowest_eigenvalues,
    quadratic_form,
    reference_extensions,
    resolvent_compression,
    robin_residual,
    robin_root,
    spectrum_csv,
    spectrum_rows,
    trial_corpus,
)


@pytest.fixture(scope="module")
def op():
    return LineOperator(400, 12.0)


@pytest.fixture(scope="module")
def refs(op):
    return reference_extensions(op)


def test_robin_root():
    k = robin_root(1.0)
    assert k * np.tan(k) == pytest.approx(1.0, abs=1e-12)
    assert k == pytest.approx(0.8603335890, abs=1e-9)


def test_grid_layout(op):
    assert op.interval_index.size == 400
    assert op.h == pytest.approx(0.005)
    assert np.all(np.abs(op.x_interval) < 1)


def test_bad_grid_rejected():
    with pytest.raises(ValueError):
        LineOperator(7)
    with pytest.raises(ValueError):
        LineOperator(400, 0.5)


def test_lambda1_m1_matches_robin_root(op):
    lam = lowest_eigenvalues(extension_Am(op, 1.0))[0]
    assert lam == pytest.approx(robin_root(1.0) ** 2, rel=0.01)


@pytest.mark.parametrize("m", [0.5, 2.0, 5.0])
def test_lambda1_matches_robin_root_other_masses(op, m):
    assert lowest_eigenvalues(extension_Am(op, m))[0] == pytest.approx(robin_root(m) ** 2, rel=0.01)


def test_lambda1_increases_towards_dirichlet(op, refs):
    lams = [lowest_eigenvalues(extension_Am(op, m))[0] for m in (0.5, 1.0, 2.0, 5.0)]
    assert np.all(np.diff(lams) > 0)
    lam_d = lowest_eigenvalues(refs[1])[0]
    assert 0 < lams[1] < lam_d
    assert lams[-1] < lam_d


def test_dirichlet_lambda1(refs):
    assert lowest_eigenvalues(refs[1])[0] == pytest.approx(np.pi**2 / 4, rel=0.005)


def test_dirichlet_spectrum_higher_modes(refs):
    lam = lowest_eigenvalues(refs[1], 3)
    exact = (np.pi * np.arange(1, 4) / 2) ** 2
    np.testing.assert_allclose(lam, exact, rtol=1e-3)


def test_krein_kernel_is_affine(op, refs):
    a_min = refs[0]
    lam = lowest_eigenvalues(a_min, 3)
    assert np.max(np.abs(lam[:2])) <= 1e-6
    assert lam[2] > 1.0
    x = op.x_interval
    for u in (np.ones_like(x), x):
        assert np.linalg.norm(a_min @ u) <= 1e-6 * np.linalg.norm(u) / op.h**2


def test_extension_symmetric(op):
    a = extension_Am(op, 1.0)
    np.testing.assert_allclose(a, a.T, atol=1e-9)


def test_resolvent_requires_positive_mass(op):
    with pytest.raises(ValueError):
        resolvent_compression(op, 0.0)


def test_ill_conditioned_resolvent_reported(op, monkeypatch):
    # on the truncated line cond(T) is about 44 / h^2, so lower the limit instead of the step
    import modgauss.helmholtz as hz

    monkeypatch.setattr(hz, "COND_LIMIT", 1e3)
    with pytest.raises(ResolutionError, match="ill-conditioned"):
        extension_Am(op, 1.0)


def test_robin_boundary_condition(op):
    assert robin_residual(op, extension_Am(op, 1.0), 1.0) <= 5 * op.h


def test_ba_identity(op):
    x = op.x_interval
    xi = np.where(np.abs(x) < 0.9, np.cos(np.pi * x / 1.8) ** 2, 0.0)
    assert ba_identity_residual(op, 1.0, xi) <= 1e-9
    with pytest.raises(ValueError):
        ba_identity_residual(op, 1.0, np.ones_like(x))


def test_sine_trial_ordered(op, refs):
    a_min, a_max = refs
    a_1 = extension_Am(op, 1.0)
    u = np.sin(np.pi * op.x_interval / 2)
    q = [quadratic_form(a, u, op.h) for a in (a_min, a_1, a_max)]
    assert all(np.isfinite(q))
    assert q[0] <= q[1] <= q[2]


def test_form_ordering_on_corpus(op, refs):
    a_min, a_max = refs
    report = form_order_check(op, a_min, extension_Am(op, 1.0), a_max, trial_corpus(op, 20, seed=3))
    assert len(report.results) == 20
    assert report.min_margin >= 0
    assert any(not r.vanishes_on_boundary and r.q_max == np.inf for r in report.results)


def test_form_order_violation_named(op, refs):
    a_min, a_max = refs
    trials = [("swapped", np.sin(np.pi * op.x_interval / 2), True)]
    with pytest.raises(FormOrderError, match="swapped"):
        form_order_check(op, a_max, extension_Am(op, 1.0), a_min, trials)


@given(st.integers(0, 2**31 - 1))
def test_krein_form_nonnegative(seed):
    op = LineOperator(40, 4.0)
    u = np.random.default_rng(seed).standard_normal(40)
    assert quadratic_form(krein_extension(op), u, op.h) >= -1e-9
    assert quadratic_form(dirichlet_extension(op), u, op.h) >= quadratic_form(krein_extension(op), u, op.h) - 1e-9


def test_spectrum_csv_deterministic(op):
    text = spectrum_csv(spectrum_rows(op, (1.0,), 2))
    assert text.splitlines()[0] == "m,k,lambda_k_Am,lambda_k_dirichlet,lambda_k_krein"
    assert len(text.splitlines()) == 3
    assert text == spectrum_csv(spectrum_rows(op, (1.0,), 2))
