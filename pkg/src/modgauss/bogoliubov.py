"""Symplectic maps between standard subspaces and their Hilbert-Schmidt defects.

A symplectic map ``T: H1 -> H2`` is stored as an n x n matrix between the
orthonormal bases of the two subspaces; it is symplectic iff
``T^T D2 T = D1`` with ``D_k`` the polarisers in those bases.

Ambient operators built from T:

* ``T~ = T P_H1 + J2 T J1 (1 - P_H1)``, the extension that intertwines the
  modular conjugations;
* ``T^ = T P_H + (1 - P_H)``, the extension by the identity on H'.

All compressions are read in orthonormal frames: Q for H, ``J Q`` for H'.
In these frames J has the identity matrix, so the closed forms below carry
no explicit J.  With ``d`` the polariser, ``s = sqrt(1 + d^2)`` and
``ds = d^-1 s``:

====================  ======================================  ==============================
compression           of ``[T~, i]``                          of ``[T^, i]`` (``T = 1 + X``)
====================  ======================================  ==============================
``E_H C|_H``          ``(T d1^-1 - d2^-1 T) - s2 G``          ``X d^-1 + d X``
``E_H C i|_H'``       ``d2 G``                                ``d X ds``
``E_H' i C|_H``       ``-d2 G``                               ``s X``
``E_H' C|_H'``        ``s2 G - (T d1^-1 - d2^-1 T)``          ``s X ds``
====================  ======================================  ==============================

where ``G = T ds1 - ds2 T``.  Since ``iCi = C`` the four compressions carry
the whole Hilbert-Schmidt norm: ``||C||_2^2`` is the sum of their squares.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .realop import psd_sqrt, random_symplectic, skew_canonical_form
from .reports import ConsistencyError, IdentityCheck, residual
from .stdspace import NotFactorialError, StandardSubspace, cutting_P_direct

SYMPLECTIC_TOL = 1e-10
BLOCK_NAMES = ("E_H C|_H", "E_H C i|_H'", "E_H' i C|_H", "E_H' C|_H'")


class NotSymplecticError(ValueError):
    pass


def _require_factorial(*hs: StandardSubspace) -> None:
    for h in hs:
        if not h.factorial:
            raise NotFactorialError("operation needs a factorial standard subspace (invertible polariser)")


def check_symplectic(t, h1: StandardSubspace, h2: StandardSubspace | None = None, tol: float = SYMPLECTIC_TOL) -> tuple[bool, float]:
    """Is ``T: H1 -> H2`` a symplectic bijection?

    The residual is the larger of ``||T^T D2 T - D1||`` and
    ``||T^T D2 - D1 T^-1||``.

    Raises:
        ValueError: dimension mismatch, or T singular.
    """
    h2 = h1 if h2 is None else h2
    t = np.asarray(t, dtype=float)
    if t.shape != (h2.n, h1.n):
        raise ValueError(f"T must be {h2.n} x {h1.n}, got {t.shape}")
    if np.linalg.matrix_rank(t) < t.shape[0]:
        raise ValueError("T is singular; a symplectic bijection must be invertible")
    d1, d2 = h1.polariser, h2.polariser
    r1 = residual(t.T @ d2 @ t, d1)
    r2 = residual(t.T @ d2, d1 @ np.linalg.inv(t))
    r = max(r1, r2)
    scale = max(1.0, np.linalg.norm(t) ** 2)
    return bool(r <= tol * scale), r


def _require_symplectic(t, h1, h2=None, tol=1e-8):
    ok, r = check_symplectic(t, h1, h2, tol=tol)
    if not ok:
        raise NotSymplecticError(f"T is not symplectic (residual {r:.2e})")


def extend_tilde(t, h1: StandardSubspace, h2: StandardSubspace | None = None, tol: float = 1e-9) -> np.ndarray:
    """``T~: h + J1 k -> T h + J2 T k`` as an ambient matrix.

    Raises:
        NotFactorialError: either subspace is not factorial.
        NotSymplecticError: T is not symplectic, or T~ fails to be.
    """
    h2 = h1 if h2 is None else h2
    _require_factorial(h1, h2)
    _require_symplectic(t, h1, h2)
    q1, q2 = h1.basis, h2.basis
    j1, j2 = h1.modular.J, h2.modular.J
    p1 = cutting_P_direct(h1)
    t_amb = q2 @ t @ q1.T
    out = t_amb @ p1 + j2 @ t_amb @ j1 @ (np.eye(p1.shape[0]) - p1)
    r = residual(out.T @ h2.i_op @ out, h1.i_op)
    if r > tol * max(1.0, np.linalg.norm(out) ** 2):
        raise NotSymplecticError(f"T~ is not symplectic on the ambient space (residual {r:.2e})")
    return out


def extend_hat(t, h: StandardSubspace) -> np.ndarray:
    """``T^: h + h' -> T h + h'`` as an ambient matrix."""
    _require_factorial(h)
    _require_symplectic(t, h)
    p = cutting_P_direct(h)
    q = h.basis
    return q @ t @ q.T @ p + np.eye(p.shape[0]) - p


@dataclass(frozen=True)
class ShaleDefect:
    hs_defect: float
    comm_defect: float
    identity_residual: float


def shale_defect(t_amb, i1: np.ndarray, i2: np.ndarray | None = None) -> ShaleDefect:
    """``||T^T T - 1||_2``, ``||T i1 - i2 T||_2`` and the operator-norm residual
    of ``T i1 - i2 T = T i1 (1 - T^T T)``."""
    i2 = i1 if i2 is None else i2
    t = np.asarray(t_amb, dtype=float)
    eye = np.eye(t.shape[1])
    comm = t @ i1 - i2 @ t
    gram = t.T @ t
    ident = comm - t @ i1 @ (eye - gram)
    return ShaleDefect(
        hs_defect=float(np.linalg.norm(gram - eye)),
        comm_defect=float(np.linalg.norm(comm)),
        identity_residual=float(np.linalg.norm(ident, 2)),
    )


def _frames(h: StandardSubspace):
    d = h.polariser
    n = h.n
    d_inv = np.linalg.inv(d)
    s = psd_sqrt(np.eye(n) + d @ d)
    return d, d_inv, s, d_inv @ s


def _compressions(c: np.ndarray, h1: StandardSubspace, h2: StandardSubspace) -> dict[str, np.ndarray]:
    """The four orthogonal-frame compressions of ``C: ambient1 -> ambient2``."""
    q1, q2 = h1.basis, h2.basis
    jq1, jq2 = h1.complement_basis, h2.complement_basis
    return {
        BLOCK_NAMES[0]: q2.T @ c @ q1,
        BLOCK_NAMES[1]: q2.T @ c @ h1.i_op @ jq1,
        BLOCK_NAMES[2]: jq2.T @ h2.i_op @ c @ q1,
        BLOCK_NAMES[3]: jq2.T @ c @ jq1,
    }


@dataclass(frozen=True)
class BlockReport:
    direct: dict
    closed: dict
    cond_a: float
    cond_b: float
    total_hs: float
    block_residual: float
    norm_residual: float

    @property
    def block_norms(self) -> tuple[float, ...]:
        return tuple(float(np.linalg.norm(self.direct[k])) for k in BLOCK_NAMES)


def _tilde_report(t, h1, h2, tol) -> BlockReport:
    _require_factorial(h1, h2)
    t = np.asarray(t, dtype=float)
    t_tilde = extend_tilde(t, h1, h2)
    c = t_tilde @ h1.i_op - h2.i_op @ t_tilde
    direct = _compressions(c, h1, h2)
    _, d1_inv, _, ds1 = _frames(h1)
    d2, d2_inv, s2, ds2 = _frames(h2)
    g = t @ ds1 - ds2 @ t
    first = t @ d1_inv - d2_inv @ t
    cond_a_op = first - s2 @ g
    cond_b_op = d2 @ g
    closed = {
        BLOCK_NAMES[0]: cond_a_op,
        BLOCK_NAMES[1]: cond_b_op,
        BLOCK_NAMES[2]: -cond_b_op,
        BLOCK_NAMES[3]: -cond_a_op,
    }
    scale = max(1.0, np.linalg.norm(c))
    block_res = max(residual(direct[k], closed[k]) for k in BLOCK_NAMES)
    if block_res > tol * scale:
        raise ConsistencyError(f"closed-form blocks of [T~, i] disagree with direct compressions by {block_res:.2e}")
    total = float(np.linalg.norm(c))
    norm_res = abs(total**2 - sum(np.linalg.norm(direct[k]) ** 2 for k in BLOCK_NAMES))
    return BlockReport(
        direct=direct,
        closed=closed,
        cond_a=float(np.linalg.norm(cond_a_op)),
        cond_b=float(np.linalg.norm(cond_b_op)),
        total_hs=total,
        block_residual=block_res,
        norm_residual=norm_res,
    )


def tilde_commutator_blocks(t, h: StandardSubspace, tol: float = 1e-8) -> BlockReport:
    """Blocks of ``[T~, i]`` for a symplectic bijection of one factorial H.

    Raises:
        ConsistencyError: closed forms and direct compressions disagree.
    """
    return _tilde_report(t, h, h, tol)


def implementability_conditions(t, h1: StandardSubspace, h2: StandardSubspace, tol: float = 1e-8) -> tuple[float, float]:
    """Hilbert-Schmidt norms of the two conditions for ``T: H1 -> H2``.

    Both are cross-checked against the compressions of ``T~ i1 - i2 T~``.
    """
    rep = _tilde_report(t, h1, h2, tol)
    return rep.cond_a, rep.cond_b


def tilde_block_report(t, h1: StandardSubspace, h2: StandardSubspace | None = None, tol: float = 1e-8) -> BlockReport:
    return _tilde_report(t, h1, h1 if h2 is None else h2, tol)


@dataclass(frozen=True)
class InnernessReport:
    operators: dict
    norms: dict
    block_residual: float
    matrix_residual: float
    simplification_residual: float

    @property
    def verdict(self) -> bool:
        """All four operators have finite Hilbert-Schmidt norm (always, in finite dimension)."""
        return all(np.isfinite(v) for v in self.norms.values())


def innerness_blocks(x, h: StandardSubspace, tol: float = 1e-8) -> InnernessReport:
    """Compressions of ``[T^, i]`` for ``T = 1 + X``, closed form vs direct.

    Raises:
        NotSymplecticError: ``1 + X`` is not symplectic.
        ConsistencyError: a closed form disagrees with its direct compression.
    """
    x = np.asarray(x, dtype=float)
    n = h.n
    t = np.eye(n) + x
    _require_factorial(h)
    _require_symplectic(t, h)
    d, d_inv, s, ds = _frames(h)
    t_hat = extend_hat(t, h)
    c = t_hat @ h.i_op - h.i_op @ t_hat
    direct = _compressions(c, h, h)
    closed = {
        BLOCK_NAMES[0]: x @ d_inv + d @ x,
        BLOCK_NAMES[1]: d @ x @ ds,
        BLOCK_NAMES[2]: s @ x,
        BLOCK_NAMES[3]: s @ x @ ds,
    }
    scale = max(1.0, np.linalg.norm(c))
    block_res = max(residual(direct[k], closed[k]) for k in BLOCK_NAMES)
    # symplectic-matrix form of [X^, i] along H ⊕ H'
    m = np.column_stack([h.basis, h.complement_basis])
    blk = np.linalg.solve(m, c @ m)
    expected = np.block([[x @ d_inv - d_inv @ x, x @ ds], [ds @ x, np.zeros((n, n))]])
    matrix_res = residual(blk, expected)
    simpl = residual((x @ d_inv - d_inv @ x) + (d_inv + d) @ x, x @ d_inv + d @ x)
    if max(block_res, matrix_res) > tol * scale:
        raise ConsistencyError(
            f"[T^, i]: closed forms disagree with direct compressions ({block_res:.2e}) or block matrix ({matrix_res:.2e})"
        )
    return InnernessReport(
        operators=closed,
        norms={k: float(np.linalg.norm(v)) for k, v in closed.items()},
        block_residual=block_res,
        matrix_residual=matrix_res,
        simplification_residual=simpl,
    )


def squeeze_on_pair(s: float) -> np.ndarray:
    """``diag(s, 1/s)``: symplectic for any 2 x 2 skew form."""
    return np.diag([s, 1.0 / s])


def random_symplectic_of(h: StandardSubspace, rng: np.random.Generator, scale: float = 0.5) -> np.ndarray:
    """Random symplectic bijection of H (matrix in the basis of H)."""
    return random_symplectic(h.polariser, rng, scale)


def symplectic_bijection_between(h1: StandardSubspace, h2: StandardSubspace) -> np.ndarray:
    """A symplectic bijection ``H1 -> H2`` built by congruence to canonical form.

    ``D_k = O_k (Σ_k ⊗ Ω) O_k^T``; ``T = O2 Σ2^{-1/2} Σ1^{1/2} O1^T`` then
    satisfies ``T^T D2 T = D1``.
    """
    _require_factorial(h1, h2)
    o1, s1 = skew_canonical_form(h1.polariser)
    o2, s2 = skew_canonical_form(h2.polariser)
    if len(s1) != len(s2):
        raise ValueError("subspaces of different dimension")
    scale = np.repeat(np.sqrt(s1 / s2), 2)
    return o2 @ np.diag(scale) @ o1.T


def squeeze_flow(h: StandardSubspace, generator_seed: int) -> callable:
    """One-parameter family ``s -> exp(s G)`` of symplectic bijections of H.

    G is a fixed random element of the symplectic Lie algebra with unit
    operator norm; ``s`` plays the part of a squeeze parameter.
    """
    rng = np.random.default_rng(generator_seed)
    n = h.n
    sym = rng.standard_normal((n, n))
    sym = 0.5 * (sym + sym.T)
    g = np.linalg.solve(h.polariser, sym)
    g /= np.linalg.norm(g, 2)
    return lambda s: expm(s * g)


def bogoliubov_checks(h: StandardSubspace, t, tol: float = 1e-8) -> list[IdentityCheck]:
    """Identity-layer checks for one (H, T) pair."""
    ok, r = check_symplectic(t, h)
    rep = tilde_commutator_blocks(t, h, tol)
    inn = innerness_blocks(np.asarray(t) - np.eye(h.n), h, tol)
    t_tilde = extend_tilde(t, h)
    sd = shale_defect(t_tilde, h.i_op)
    scale = max(1.0, rep.total_hs)
    return [
        IdentityCheck("T^T D T = D", r, SYMPLECTIC_TOL * max(1.0, np.linalg.norm(t) ** 2)),
        IdentityCheck("[T~,i] closed-form blocks = direct", rep.block_residual, tol * scale),
        IdentityCheck("||[T~,i]||^2 = sum of block norms^2", rep.norm_residual, tol * scale**2),
        IdentityCheck("[T^,i] closed-form blocks = direct", inn.block_residual, tol * scale),
        IdentityCheck("[T^,i] symplectic matrix form", inn.matrix_residual, tol * scale),
        IdentityCheck("[X,D^-1] + (D^-1+D)X = XD^-1 + DX", inn.simplification_residual, tol * scale),
        IdentityCheck("[T~,i] = T~ i (1 - T~^T T~)", sd.identity_residual, tol * max(1.0, np.linalg.norm(t_tilde) ** 3)),
    ]


def scan_rows(dims, seeds, s_values, tol: float = 1e-8):
    """Rows ``(N, seed, s, cond_a, cond_b, block norms...)`` of a squeeze scan."""
    from .dilation import random_factorial_subspace

    rows = []
    for n in dims:
        for seed in seeds:
            rng = np.random.default_rng([seed, n])
            h = random_factorial_subspace(n, rng)
            flow = squeeze_flow(h, seed)
            for s in s_values:
                rep = tilde_commutator_blocks(flow(s), h, tol)
                rows.append((n, seed, s, rep.cond_a, rep.cond_b, *rep.block_norms))
    return rows
