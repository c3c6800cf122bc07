"""Standard subspaces of a realified complex space and their modular data.

A real subspace H of C^N (as R^{2N}) is standard when ``H + iH`` is the whole
space and ``H ∩ iH = 0``; in finite dimension this forces ``dim_R H = N``.
Everything here is an exact matrix identity at finite dimension: the Tomita
operator ``S: h + ik -> h - ik`` is a genuine 2N x 2N real matrix, and the
modular operator, conjugation and Hamiltonian are read off its polar
decomposition.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from .realop import DEFAULT_TOL, RealifiedSpace, psd_sqrt, sym_function
from .reports import ConsistencyError, IdentityCheck, residual

FACTORIAL_TOL = 1e-10
# relative guard band around 1 in spec(Delta) for the cutting projection
CUTTING_GUARD = 1e-8


class NotStandardError(ValueError):
    pass


class NotFactorialError(ValueError):
    pass


class CuttingSingularityError(NotFactorialError):
    def __init__(self, eigenvalue: float):
        self.eigenvalue = eigenvalue
        super().__init__(f"Delta has eigenvalue {eigenvalue!r} within the guard band of 1; cutting projection undefined")


@dataclass(frozen=True)
class ModularData:
    """Tomita operator S and its polar parts ``S = J Delta^{1/2}``."""

    S: np.ndarray = field(repr=False)
    Delta: np.ndarray = field(repr=False)
    J: np.ndarray = field(repr=False)
    L: np.ndarray = field(repr=False)
    i_op: np.ndarray = field(repr=False)

    @cached_property
    def _eig(self):
        return np.linalg.eigh(0.5 * (self.L + self.L.T))

    @property
    def delta_spectrum(self) -> np.ndarray:
        return np.exp(self._eig[0])

    def function_of_L(self, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """Complex-linear ``f(L)`` for a complex-valued ``f``, as a real matrix.

        ``L`` commutes with i, so ``f(L) = Re f(L) + i Im f(L)``.
        """
        w, v = self._eig
        fw = np.asarray(f(w), dtype=complex)
        re = (v * fw.real) @ v.T
        im = (v * fw.imag) @ v.T
        return re + self.i_op @ im

    def delta_it(self, s: float) -> np.ndarray:
        """The modular unitary ``Delta^{is}``."""
        return self.function_of_L(lambda t: np.exp(1j * s * t))


@dataclass(frozen=True)
class StandardSubspace:
    """A validated standard subspace with an orthonormal basis (2N x N)."""

    space: RealifiedSpace
    basis: np.ndarray = field(repr=False)
    factorial: bool = False
    cyclic: bool = True
    separating: bool = True

    @property
    def i_op(self) -> np.ndarray:
        return self.space.i_op

    @property
    def n(self) -> int:
        return self.basis.shape[1]

    @cached_property
    def E(self) -> np.ndarray:
        """Orthogonal projection onto H (Gram route)."""
        return self.basis @ self.basis.T

    @cached_property
    def polariser(self) -> np.ndarray:
        """``D_H = -E_H i|_H`` in the orthonormal basis of H."""
        q = self.basis
        d = -q.T @ self.i_op @ q
        return 0.5 * (d - d.T)

    @cached_property
    def modular(self) -> ModularData:
        return modular_data(self)

    @cached_property
    def complement_basis(self) -> np.ndarray:
        """Orthonormal basis ``J Q`` of the symplectic complement H'."""
        return self.modular.J @ self.basis

    def restrict(self, op: np.ndarray, check: bool = True, tol: float = 1e-8) -> np.ndarray:
        """Matrix of ``op|_H`` in the basis of H; ``op`` must leave H invariant."""
        q = self.basis
        img = op @ q
        if check:
            leak = np.linalg.norm(img - q @ (q.T @ img))
            if leak > tol * max(1.0, np.linalg.norm(img)):
                raise ValueError(f"operator does not leave H invariant (leak {leak:.2e})")
        return q.T @ img

    def embed(self, op_h: np.ndarray) -> np.ndarray:
        """Ambient operator ``Q op Q^T`` acting as ``op_h`` on H and 0 on H^⊥."""
        return self.basis @ op_h @ self.basis.T


def _orthonormal_columns(vectors: np.ndarray, tol: float) -> np.ndarray:
    k = vectors.shape[1]
    if np.linalg.norm(vectors.T @ vectors - np.eye(k)) <= 1e-12:
        # keep a caller-chosen orthonormal frame
        return vectors.copy()
    u, s, _ = np.linalg.svd(vectors, full_matrices=False)
    rank = int(np.sum(s > tol * max(1.0, s.max(initial=0.0))))
    if rank < vectors.shape[1]:
        raise NotStandardError(f"vectors are not linearly independent (rank {rank} < {vectors.shape[1]})")
    return u


def standard_subspace_from_basis(space: RealifiedSpace, vectors, tol: float = 1e-10) -> StandardSubspace:
    """Validate and orthonormalise a spanning set of a standard subspace.

    Args:
        space: ambient realified space.
        vectors: array of shape (2N, k); columns span H.

    Raises:
        NotStandardError: H not separating or not cyclic; the message gives
            the failing rank.
    """
    v = np.asarray(vectors, dtype=float)
    if v.ndim == 1:
        v = v[:, None]
    if v.shape[0] != space.real_dim:
        raise ValueError(f"vectors live in R^{v.shape[0]}, ambient is R^{space.real_dim}")
    q = _orthonormal_columns(v, tol)
    k = q.shape[1]
    rank = np.linalg.matrix_rank(np.column_stack([q, space.i_op @ q]), tol=tol)
    overlap = 2 * k - rank
    if overlap > 0:
        raise NotStandardError(f"not separating: dim(H ∩ iH) = {overlap} (rank[H, iH] = {rank})")
    if rank < space.real_dim:
        raise NotStandardError(f"not cyclic: rank[H, iH] = {rank} < {space.real_dim}")
    d = -q.T @ space.i_op @ q
    smin = np.linalg.svd(d, compute_uv=False).min()
    return StandardSubspace(space=space, basis=q, factorial=bool(smin > FACTORIAL_TOL))


def modular_data(h: StandardSubspace) -> ModularData:
    """S, Delta, J and L = log Delta of a standard subspace."""
    q, i_op = h.basis, h.i_op
    m_plus = np.column_stack([q, i_op @ q])
    m_minus = np.column_stack([q, -i_op @ q])
    s = m_minus @ np.linalg.inv(m_plus)
    delta = s.T @ s
    delta = 0.5 * (delta + delta.T)
    w, v = np.linalg.eigh(delta)
    w = np.clip(w, 1e-300, None)
    delta_m_half = (v / np.sqrt(w)) @ v.T
    j = s @ delta_m_half
    log_delta = (v * np.log(w)) @ v.T
    return ModularData(S=s, Delta=delta, J=j, L=0.5 * (log_delta + log_delta.T), i_op=i_op)


def modular_checks(h: StandardSubspace, tol: float = DEFAULT_TOL) -> list[IdentityCheck]:
    md = h.modular
    i_op = h.i_op
    dim = i_op.shape[0]
    eye = np.eye(dim)
    d_inv = np.linalg.inv(md.Delta)
    checks = [
        IdentityCheck("S^2 = 1", residual(md.S @ md.S, eye), tol),
        IdentityCheck("S = J Delta^1/2", residual(md.S, md.J @ psd_sqrt(md.Delta)), tol),
        IdentityCheck("J Delta J = Delta^-1", residual(md.J @ md.Delta @ md.J, d_inv), tol * max(1.0, np.linalg.norm(d_inv))),
        IdentityCheck("J^2 = 1", residual(md.J @ md.J, eye), tol),
        IdentityCheck("J^T J = 1", residual(md.J.T @ md.J, eye), tol),
        IdentityCheck("S i + i S = 0", residual(md.S @ i_op, -i_op @ md.S), tol),
        IdentityCheck("J i + i J = 0", residual(md.J @ i_op, -i_op @ md.J), tol),
        IdentityCheck("[Delta, i] = 0", residual(md.Delta @ i_op, i_op @ md.Delta), tol * max(1.0, np.linalg.norm(md.Delta))),
    ]
    e = h.E
    for s in (0.3, 1.0, 2.7):
        u = md.delta_it(s)
        checks.append(IdentityCheck(f"Delta^is H = H (s={s})", float(np.linalg.norm((eye - e) @ u @ e)), tol))
    # J H = H' = (iH)^perp
    jq = md.J @ h.basis
    checks.append(IdentityCheck("J H = (iH)^perp", float(np.linalg.norm((i_op @ h.basis).T @ jq)), tol))
    return checks


def projection_E(h: StandardSubspace, tol: float = 1e-10) -> np.ndarray:
    """Orthogonal projection onto H, cross-checked against the modular formula.

    Raises:
        ConsistencyError: Gram and modular routes disagree beyond ``tol``.
    """
    gram = h.E
    formula = projection_E_formula(h)
    r = residual(gram, formula)
    if r > tol * max(1.0, np.linalg.norm(gram)):
        raise ConsistencyError(f"E_H from Gram and from (1+Delta)^-1 + J Delta^1/2 (1+Delta)^-1 differ by {r:.2e}")
    return gram


def projection_E_formula(h: StandardSubspace) -> np.ndarray:
    md = h.modular
    eye = np.eye(md.Delta.shape[0])
    r = np.linalg.inv(eye + md.Delta)
    return r + md.J @ psd_sqrt(md.Delta) @ r


def _cutting_guard(h: StandardSubspace) -> None:
    lam = h.modular.delta_spectrum
    gap = np.abs(lam - 1.0)
    k = int(np.argmin(gap))
    if gap[k] <= CUTTING_GUARD * max(1.0, lam[k]):
        raise CuttingSingularityError(float(lam[k]))


def cutting_P_direct(h: StandardSubspace) -> np.ndarray:
    """``P_H: h + h' -> h`` by solving in the basis of H ⊕ H'."""
    _cutting_guard(h)
    q = h.basis
    m = np.column_stack([q, h.complement_basis])
    coords = np.linalg.solve(m, np.eye(m.shape[0]))
    return q @ coords[: h.n]


def cutting_P_formulas(h: StandardSubspace) -> tuple[np.ndarray, np.ndarray]:
    """``(1-Delta)^-1 + J Delta^1/2 (1-Delta)^-1`` and ``-E coth(L/2)``."""
    _cutting_guard(h)
    md = h.modular
    eye = np.eye(md.Delta.shape[0])
    r = np.linalg.inv(eye - md.Delta)
    p_fp = r + md.J @ psd_sqrt(md.Delta) @ r
    coth = sym_function(md.L, lambda t: 1.0 / np.tanh(t / 2))
    p_pe = -h.E @ coth
    return p_fp, p_pe


def cutting_P(h: StandardSubspace, tol: float = 1e-8) -> np.ndarray:
    """Cutting projection onto H along H', checked against both closed forms.

    Raises:
        CuttingSingularityError: 1 lies in the guard band of spec(Delta)
            (H not factorial, or nearly so).
        ConsistencyError: the direct and closed-form routes disagree.
    """
    p = cutting_P_direct(h)
    p_fp, p_pe = cutting_P_formulas(h)
    scale = max(1.0, np.linalg.norm(p))
    for name, other in (("(1-Delta)^-1 formula", p_fp), ("-E coth(L/2)", p_pe)):
        r = residual(p, other)
        if r > tol * scale:
            raise ConsistencyError(f"cutting projection: direct route and {name} differ by {r:.2e}")
    return p


def polariser_embedded(h: StandardSubspace, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, list[IdentityCheck]]:
    """Polariser ``D_H`` with the report of its functional-calculus identities.

    Inverse identities are skipped (with an entry of residual ``nan``
    and name suffix ``skipped``) when H is not factorial.
    """
    d = h.polariser
    md = h.modular
    i_op = h.i_op
    n = h.n
    eye = np.eye(n)
    e_h = h.E
    e_hp = md.J @ e_h @ md.J
    e_ih = -i_op @ e_h @ i_op
    one_plus_d2 = eye + d @ d
    sqrt_1d2 = psd_sqrt(one_plus_d2)

    def fl(f):
        return h.restrict(md.function_of_L(f))

    checks = [
        IdentityCheck("D* = -D", residual(d.T, -d), tol),
        IdentityCheck("||D|| <= 1", max(0.0, np.linalg.norm(d, 2) - 1.0), tol),
        IdentityCheck("D = i tanh(L/2)|_H", residual(d, fl(lambda t: 1j * np.tanh(t / 2))), tol),
        IdentityCheck("sqrt(1+D^2) = 1/cosh(L/2)|_H", residual(sqrt_1d2, fl(lambda t: 1 / np.cosh(t / 2))), tol),
        IdentityCheck("E_H E_H'|_H = 1 + D^2", residual(h.restrict(e_h @ e_hp), one_plus_d2), tol),
        IdentityCheck(
            "E_H E_H'|_H + E_H E_iH|_H = 1",
            residual(h.restrict(e_h @ e_hp) + h.restrict(e_h @ e_ih), eye),
            tol,
        ),
        IdentityCheck("D^2 = -E_H E_iH|_H", residual(d @ d, -h.restrict(e_h @ e_ih)), tol),
    ]
    if h.factorial:
        d_inv = np.linalg.inv(d)
        scale = max(1.0, np.linalg.norm(d_inv))
        p = cutting_P_direct(h)
        checks += [
            IdentityCheck("D^-1 = P i|_H", residual(d_inv, h.restrict(p @ i_op)), tol * scale),
            IdentityCheck("D^-1 = -i coth(L/2)|_H", residual(d_inv, fl(lambda t: -1j / np.tanh(t / 2))), tol * scale),
            IdentityCheck(
                "D^-1 sqrt(1+D^2) = -i/sinh(L/2)|_H",
                residual(d_inv @ sqrt_1d2, fl(lambda t: -1j / np.sinh(t / 2))),
                tol * scale,
            ),
        ]
    else:
        checks += [
            IdentityCheck(name + " [skipped: not factorial]", float("nan"), tol)
            for name in ("D^-1 = P i|_H", "D^-1 = -i coth(L/2)|_H", "D^-1 sqrt(1+D^2) = -i/sinh(L/2)|_H")
        ]
    return d, checks


def type_one_trace(h: StandardSubspace) -> float:
    """``tr(1 + D^2)``; finiteness in infinite dimension signals a type I subspace."""
    d = h.polariser
    return float(np.trace(np.eye(h.n) + d @ d))


def projection_checks(h: StandardSubspace, tol: float = 1e-8) -> list[IdentityCheck]:
    """Gram vs closed-form projections and the projector axioms."""
    e = h.E
    checks = [
        IdentityCheck("E_H gram = (1+Delta)^-1 + J Delta^1/2 (1+Delta)^-1", residual(e, projection_E_formula(h)), tol),
        IdentityCheck("E^2 = E", residual(e @ e, e), tol),
        IdentityCheck("E^T = E", residual(e.T, e), tol),
    ]
    if h.factorial:
        p = cutting_P_direct(h)
        p_fp, p_pe = cutting_P_formulas(h)
        scale = max(1.0, np.linalg.norm(p))
        p_prime = cutting_P_direct(complement(h))
        checks += [
            IdentityCheck("P_H direct = (1-Delta)^-1 + J Delta^1/2 (1-Delta)^-1", residual(p, p_fp), tol * scale),
            IdentityCheck("P_H direct = -E_H coth(L/2)", residual(p, p_pe), tol * scale),
            IdentityCheck("P_H + P_H' = 1", residual(p + p_prime, np.eye(p.shape[0])), tol * scale),
            IdentityCheck("P_H^2 = P_H", residual(p @ p, p), tol * scale),
        ]
    return checks


def complement(h: StandardSubspace) -> StandardSubspace:
    """The symplectic complement H' as a standard subspace."""
    return standard_subspace_from_basis(h.space, h.complement_basis)


def symplectic_blocks(c: np.ndarray, h: StandardSubspace) -> dict[str, np.ndarray]:
    """Blocks of ``C`` along the direct sum ``H ⊕ H'``.

    H is written in its orthonormal basis Q and H' in ``J Q``; in these
    frames J: H -> H' and J: H' -> H both have the identity matrix.

    Returns:
        dict with keys ``"11", "12", "21", "22"``; ``"12"`` is
        ``P_H C|_{H'}`` and so on.
    """
    if not h.factorial:
        raise NotFactorialError("symplectic matrix decomposition needs a factorial subspace")
    q = h.basis
    m = np.column_stack([q, h.complement_basis])
    blk = np.linalg.solve(m, c @ m)
    n = h.n
    return {"11": blk[:n, :n], "12": blk[:n, n:], "21": blk[n:, :n], "22": blk[n:, n:]}


def block_formula_checks(h: StandardSubspace, tol: float = 1e-8) -> list[IdentityCheck]:
    """Symplectic-matrix forms of i, E_H, E_H^⊥, E_H' and ``P_H' i|_H``."""
    d = h.polariser
    n = h.n
    eye, zero = np.eye(n), np.zeros((n, n))
    d_inv = np.linalg.inv(d)
    sq = psd_sqrt(eye + d @ d)
    ds = d_inv @ sq
    scale = max(1.0, np.linalg.norm(d_inv))
    i_blocks = symplectic_blocks(h.i_op, h)
    expected_i = {"11": d_inv, "12": ds, "21": -ds, "22": -d_inv}
    checks = [IdentityCheck(f"i block {k}", residual(i_blocks[k], v), tol * scale) for k, v in expected_i.items()]
    md = h.modular
    projections = {
        "E_H": (h.E, {"11": eye, "12": sq, "21": zero, "22": zero}),
        "E_H^perp": (np.eye(2 * n) - h.E, {"11": zero, "12": -sq, "21": zero, "22": eye}),
        "E_H'": (md.J @ h.E @ md.J, {"11": zero, "12": zero, "21": sq, "22": eye}),
    }
    for name, (op, expected) in projections.items():
        blocks = symplectic_blocks(op, h)
        r = max(residual(blocks[k], expected[k]) for k in expected)
        checks.append(IdentityCheck(f"{name} symplectic blocks", r, tol * scale))
    # P_H' i|_H = -J D^-1 sqrt(1+D^2), read in the J Q frame of H'
    p_prime = np.eye(2 * n) - cutting_P_direct(h)
    jq = h.complement_basis
    pi = jq.T @ p_prime @ h.i_op @ h.basis
    checks.append(IdentityCheck("P_H' i|_H = -J D^-1 sqrt(1+D^2)", residual(pi, -ds), tol * scale))
    return checks
