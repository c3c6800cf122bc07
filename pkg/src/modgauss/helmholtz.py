"""Self-adjoint extensions of the Laplacian on an interval via the Helmholtz resolvent.

The line is truncated to ``[-L, L]`` (Dirichlet ends) and discretised on a
cell-centred grid of step h chosen so that the interval ``B = (-1, 1)``
consists of exactly ``n_interval`` cells.  ``A = -d^2/dx^2`` is the
three-point Laplacian.

* ``A_m``: compress ``(A + m^2)^-1`` to the interval cells, invert, subtract
  ``m^2``.  In the continuum this is the Laplacian on B with the Robin
  condition ``f'(±1) = ∓ m f(±1)``.
* Friedrichs (``A_max``): Dirichlet Laplacian on B, boundary imposed at the
  cell faces ±1 through the ghost value ``u_ghost = -u_edge``.
* Krein (``A_min``): the soft extension whose kernel is the affine functions.
  Its discrete quadratic form is

      q_K(u) = Σ (u_{j+1} - u_j)^2 / h  -  (u_last - u_first)^2 / ((n-1) h),

  the gradient energy minus its affine part; by Cauchy-Schwarz it is
  non-negative and vanishes exactly on affine grid functions.

Quadratic forms are ``q(u) = h u^T A u`` so that they approximate
``∫ u A u dx``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.linalg import eigh, solve_banded

COND_LIMIT = 1e12


class ResolutionError(RuntimeError):
    pass


class FormOrderError(AssertionError):
    pass


@dataclass(frozen=True)
class LineOperator:
    """Discrete ``-d^2/dx^2`` on ``[-L, L]`` with B resolved by ``n_interval`` cells."""

    n_interval: int = 400
    box_half_length: float = 12.0

    def __post_init__(self):
        if self.n_interval < 4 or self.n_interval % 2:
            raise ValueError(f"n_interval must be even and >= 4, got {self.n_interval}")
        if self.box_half_length <= 1.0:
            raise ValueError("box must contain the interval")

    @cached_property
    def h(self) -> float:
        return 2.0 / self.n_interval

    @cached_property
    def n_cells(self) -> int:
        return int(round(2 * self.box_half_length / self.h))

    @cached_property
    def x(self) -> np.ndarray:
        return -self.box_half_length + self.h * (np.arange(self.n_cells) + 0.5)

    @cached_property
    def interval_index(self) -> np.ndarray:
        idx = np.flatnonzero(np.abs(self.x) < 1.0)
        if idx.size != self.n_interval:
            raise ResolutionError(f"grid places {idx.size} cells in B, expected {self.n_interval}")
        return idx

    @property
    def x_interval(self) -> np.ndarray:
        return self.x[self.interval_index]

    def banded(self, shift: float = 0.0) -> np.ndarray:
        """``A + shift`` in LAPACK banded storage (Dirichlet at ±L)."""
        n, h2 = self.n_cells, self.h**2
        ab = np.empty((3, n))
        ab[0, :] = -1.0 / h2
        ab[1, :] = 2.0 / h2 + shift
        ab[2, :] = -1.0 / h2
        ab[1, 0] += 1.0 / h2  # ghost = -u at the outer faces
        ab[1, -1] += 1.0 / h2
        return ab

    def dense_interval_block(self) -> np.ndarray:
        """Rows and columns of A on the interval cells (exterior set to zero)."""
        n, h2 = self.n_interval, self.h**2
        return (np.diag(np.full(n, 2.0)) - np.diag(np.ones(n - 1), 1) - np.diag(np.ones(n - 1), -1)) / h2


def resolvent_compression(op: LineOperator, m: float) -> np.ndarray:
    """``T = E (A + m^2)^-1 |_K`` by solving against the interval unit vectors."""
    if m <= 0:
        raise ValueError(f"m must be > 0 (the resolvent at 0 is undefined on the line), got {m}")
    idx = op.interval_index
    rhs = np.zeros((op.n_cells, idx.size))
    rhs[idx, np.arange(idx.size)] = 1.0
    sol = solve_banded((1, 1), op.banded(m * m), rhs)
    t = sol[idx, :]
    return 0.5 * (t + t.T)


def extension_Am(op: LineOperator, m: float) -> np.ndarray:
    """``A_m = T^-1 - m^2`` on the interval cells.

    Raises:
        ResolutionError: T has condition number above 1e12.
    """
    t = resolvent_compression(op, m)
    sv = np.linalg.svd(t, compute_uv=False)
    if sv.min() <= 0 or sv.max() / sv.min() > COND_LIMIT:
        raise ResolutionError(f"compressed resolvent ill-conditioned (cond {sv.max() / max(sv.min(), 1e-300):.2e})")
    a_m = np.linalg.inv(t) - m * m * np.eye(t.shape[0])
    return 0.5 * (a_m + a_m.T)


def dirichlet_extension(op: LineOperator) -> np.ndarray:
    """Friedrichs extension: Dirichlet Laplacian on B, boundary at the faces ±1."""
    a = op.dense_interval_block()
    a[0, 0] += 1.0 / op.h**2
    a[-1, -1] += 1.0 / op.h**2
    return a


def krein_extension(op: LineOperator) -> np.ndarray:
    """Krein extension: Neumann gradient energy minus its affine part."""
    n, h = op.n_interval, op.h
    lap = op.dense_interval_block()
    lap[0, 0] -= 1.0 / h**2
    lap[-1, -1] -= 1.0 / h**2
    e = np.zeros(n)
    e[0], e[-1] = -1.0, 1.0
    return lap - np.outer(e, e) / ((n - 1) * h * h)


def reference_extensions(op: LineOperator) -> tuple[np.ndarray, np.ndarray]:
    """``(A_min, A_max)`` = (Krein, Friedrichs)."""
    return krein_extension(op), dirichlet_extension(op)


def lowest_eigenvalues(a: np.ndarray, k: int = 1) -> np.ndarray:
    return eigh(a, eigvals_only=True, subset_by_index=[0, k - 1])


def robin_root(m: float) -> float:
    """Smallest positive k with ``k tan k = m``; ``k^2`` is the lowest Robin eigenvalue on (-1, 1)."""
    from scipy.optimize import brentq

    return brentq(lambda k: k * np.tan(k) - m, 1e-12, np.pi / 2 - 1e-12)


def robin_residual(op: LineOperator, a_m: np.ndarray, m: float) -> float:
    """``|f'(1) + m f(1)| / max|f|`` for the lowest eigenfunction, by one-sided extrapolation."""
    _, v = eigh(a_m, subset_by_index=[0, 0])
    f = v[:, 0]
    h = op.h
    f_b = 1.5 * f[-1] - 0.5 * f[-2]
    fp_b = (f[-1] - f[-2]) / h
    return float(abs(fp_b + m * f_b) / np.max(np.abs(f)))


def ba_identity_residual(op: LineOperator, m: float, xi: np.ndarray) -> float:
    """``||T (A_0 + m^2) xi - xi|| / ||xi||`` for xi vanishing on the two edge cells."""
    xi = np.asarray(xi, dtype=float)
    if xi[0] != 0 or xi[-1] != 0:
        raise ValueError("xi must vanish on the edge cells so that A xi stays inside B")
    t = resolvent_compression(op, m)
    a0 = op.dense_interval_block() + m * m * np.eye(xi.size)
    return float(np.linalg.norm(t @ (a0 @ xi) - xi) / np.linalg.norm(xi))


def quadratic_form(a: np.ndarray, u: np.ndarray, h: float) -> float:
    return float(h * u @ a @ u)


@dataclass(frozen=True)
class TrialResult:
    name: str
    q_min: float
    q_m: float
    q_max: float
    vanishes_on_boundary: bool

    @property
    def margin(self) -> float:
        lo = self.q_m - self.q_min
        hi = self.q_max - self.q_m if self.vanishes_on_boundary else np.inf
        return float(min(lo, hi))


@dataclass(frozen=True)
class FormOrderReport:
    results: list = field(default_factory=list)

    @property
    def min_margin(self) -> float:
        return min(r.margin for r in self.results)


def form_order_check(op: LineOperator, a_min, a_m, a_max, trials, tol: float = 1e-9) -> FormOrderReport:
    """Check ``q_min(u) <= q_m(u) <= q_max(u)`` on named trial functions.

    ``trials`` is a list of ``(name, samples, vanishes_on_boundary)``.  The
    Friedrichs form is finite only on functions vanishing at ±1; for the
    others q_max is reported as ``inf``.

    Raises:
        FormOrderError: an inequality fails by more than ``tol`` (relative),
            naming the trial function.
    """
    h = op.h
    out = []
    for name, u, vanishes in trials:
        u = np.asarray(u, dtype=float)
        q0 = quadratic_form(a_min, u, h)
        q1 = quadratic_form(a_m, u, h)
        q2 = quadratic_form(a_max, u, h) if vanishes else np.inf
        scale = max(1.0, abs(q1))
        if q0 > q1 + tol * scale:
            raise FormOrderError(f"trial {name!r}: q_min = {q0:.6g} > q_m = {q1:.6g}")
        if vanishes and q1 > q2 + tol * scale:
            raise FormOrderError(f"trial {name!r}: q_m = {q1:.6g} > q_max = {q2:.6g}")
        out.append(TrialResult(name, q0, q1, q2, vanishes))
    return FormOrderReport(out)


def trial_corpus(op: LineOperator, count: int = 20, seed: int = 3) -> list[tuple[str, np.ndarray, bool]]:
    """Polynomial-times-profile trial functions on the interval cells.

    Even-numbered entries carry the factor ``(1 - x^2)`` and belong to the
    Friedrichs form domain; odd-numbered entries include affine parts and
    nonzero boundary values.
    """
    rng = np.random.default_rng(seed)
    x = op.x_interval
    out = []
    for j in range(count):
        coeffs = rng.standard_normal(5)
        poly = np.polynomial.polynomial.polyval(x, coeffs)
        if j % 2 == 0:
            out.append((f"bump-poly-{j}", (1 - x**2) * poly, True))
        else:
            out.append((f"poly-{j}", poly + rng.standard_normal() * x, False))
    return out


def spectrum_rows(op: LineOperator, masses, k: int = 3) -> list[tuple]:
    """Rows ``(m, k, lambda_k(A_m), lambda_k(Dirichlet), lambda_k(Krein))``."""
    a_min, a_max = reference_extensions(op)
    lam_d = lowest_eigenvalues(a_max, k)
    lam_k = lowest_eigenvalues(a_min, k)
    rows = []
    for m in masses:
        lam_m = lowest_eigenvalues(extension_Am(op, m), k)
        for j in range(k):
            rows.append((float(m), j + 1, float(lam_m[j]), float(lam_d[j]), float(lam_k[j])))
    return rows


def spectrum_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["m", "k", "lambda_k_Am", "lambda_k_dirichlet", "lambda_k_krein"])
    for r in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()
