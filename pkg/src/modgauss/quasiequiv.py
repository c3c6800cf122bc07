"""Gaussian states, a truncated Fock space, and the quasi-equivalence criteria.

Two Gaussian states on the same symplectic space (H, beta) differ only in
the real scalar product: ``phi_k(V(h)) = exp(-alpha_k(h, h) / 2)``.  Every
criterion quantity below is an operator on H written in the original
coordinates of the abstract subspace ("raw" matrices, e.g. ``D_k =
A_k^-1 B``).  Hilbert-Schmidt norms are taken from ``(H, alpha_1)`` to
``(H, alpha_2)``:

    ||X|| = ||A_2^{1/2} X A_1^{-1/2}||_F,

which is the norm in which the theorem's conditions coincide with the
implementability conditions for the identity map between the two
one-particle structures.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations_with_replacement

import numpy as np
import scipy.sparse as sp
from scipy.linalg import sqrtm

from .dilation import AbstractSubspace, abstract_subspace, symplectic_dilation
from .realop import polariser_calculus, psd_sqrt
from .reports import IdentityCheck
from .stdspace import NotFactorialError, cutting_P_direct

# ---------------------------------------------------------------- states


@dataclass(frozen=True)
class GaussianState:
    abstract: AbstractSubspace

    def kernel(self, h) -> float:
        return gaussian_kernel(self, h)


def gaussian_kernel(state: GaussianState, h) -> float:
    """``exp(-alpha(h, h) / 2)``."""
    h = np.asarray(h, dtype=float)
    return float(np.exp(-0.5 * state.abstract.alpha(h, h)))


def kernel_gram(state: GaussianState, family) -> np.ndarray:
    """``[phi(V(h_j - h_i)) exp(i beta(h_i, h_j))]_{ij}``; PSD for a state."""
    fam = np.asarray(family, dtype=float)
    a, b = state.abstract.A, state.abstract.B
    diff = fam[None, :, :] - fam[:, None, :]
    quad = np.einsum("ijk,kl,ijl->ij", diff, a, diff)
    beta = fam @ b @ fam.T
    return np.exp(-0.5 * quad) * np.exp(1j * beta)


def modular_flow_on_h(ab: AbstractSubspace, s: float) -> np.ndarray:
    """``Delta^{is}|_H`` in raw coordinates, from the symplectic dilation."""
    dil = symplectic_dilation(ab)
    frame = dil.subspace.restrict(dil.subspace.modular.delta_it(s))
    return ab.A_isqrt @ frame @ ab.A_sqrt


def polariser_rescaling_residual(a1, b, t) -> float:
    """``||D1 - T D2||`` when ``alpha_2(h, k) = alpha_1(h, T k)``."""
    a1 = np.asarray(a1, dtype=float)
    a2 = a1 @ np.asarray(t, dtype=float)
    d1 = np.linalg.solve(a1, b)
    d2 = np.linalg.solve(a2, b)
    return float(np.linalg.norm(d1 - t @ d2))


# ---------------------------------------------------------- Fock space


class CutoffError(ValueError):
    def __init__(self, required: int, message: str):
        self.required = required
        super().__init__(message)


def truncation_remainder(norm_h: float, cutoff: int) -> float:
    """``||h||^{2(c+1)} / (c+1)!``: tail of the squared coherent-vector norm."""
    k = cutoff + 1
    return float(np.exp(2 * k * np.log(max(norm_h, 1e-300)) - math.lgamma(k + 1)))


def required_cutoff(norm_h: float, tol: float) -> int:
    c = 0
    while truncation_remainder(norm_h, c) > tol:
        c += 1
    return c


class TruncatedFock:
    """Symmetric Fock space over C^n_modes, total particle number <= cutoff.

    Basis vectors are occupation-number tuples; ``a[j]`` are sparse
    annihilation operators.  Creation beyond the cutoff is dropped, so a
    normal-ordered Weyl operator here is exactly the compression of the true
    one to the truncated space.
    """

    def __init__(self, n_modes: int, cutoff: int = 40):
        if n_modes < 1 or cutoff < 0:
            raise ValueError(f"need n_modes >= 1 and cutoff >= 0, got {n_modes}, {cutoff}")
        self.n_modes = n_modes
        self.cutoff = cutoff
        states = [(0,) * n_modes]
        for total in range(1, cutoff + 1):
            for combo in combinations_with_replacement(range(n_modes), total):
                occ = [0] * n_modes
                for j in combo:
                    occ[j] += 1
                states.append(tuple(occ))
        self.states = states
        self.index = {s: k for k, s in enumerate(states)}
        self.number = np.array([sum(s) for s in states])

    @property
    def dim(self) -> int:
        return len(self.states)

    @cached_property
    def annihilators(self) -> list[sp.csr_matrix]:
        ops = []
        for j in range(self.n_modes):
            rows, cols, vals = [], [], []
            for k, s in enumerate(self.states):
                if s[j] > 0:
                    lower = list(s)
                    lower[j] -= 1
                    rows.append(self.index[tuple(lower)])
                    cols.append(k)
                    vals.append(np.sqrt(s[j]))
            ops.append(sp.csr_matrix((vals, (rows, cols)), shape=(self.dim, self.dim)))
        return ops

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1.0
        return v

    def sector(self, max_particles: int) -> np.ndarray:
        """Indices of basis vectors with at most ``max_particles`` quanta."""
        return np.flatnonzero(self.number <= max_particles)

    def a_op(self, h) -> sp.csr_matrix:
        """Annihilator ``a(h)``, antilinear in h."""
        h = np.asarray(h, dtype=complex)
        return sum(np.conj(h[j]) * self.annihilators[j] for j in range(self.n_modes))

    def a_dag_op(self, h) -> sp.csr_matrix:
        h = np.asarray(h, dtype=complex)
        return sum(h[j] * self.annihilators[j].T.conj() for j in range(self.n_modes)).tocsr()

    def coherent(self, h) -> np.ndarray:
        """Truncated ``e^h = exp(a*(h)) e^0``."""
        return _exp_nilpotent(self.a_dag_op(h), self.vacuum()[:, None], self.cutoff)[:, 0]


def _exp_nilpotent(op, vecs: np.ndarray, max_power: int) -> np.ndarray:
    out = vecs.astype(complex).copy()
    term = out.copy()
    for k in range(1, max_power + 1):
        term = op @ term / k
        if not np.any(term):
            break
        out += term
    return out


@dataclass(frozen=True)
class TruncatedWeyl:
    """Normal-ordered ``V(h) = e^{-|h|^2/2} exp(a*(h)) exp(-a(h))`` on a truncated space."""

    fock: TruncatedFock
    h: np.ndarray

    def apply(self, vecs: np.ndarray) -> np.ndarray:
        f = self.fock
        v = np.asarray(vecs, dtype=complex)
        squeeze = v.ndim == 1
        if squeeze:
            v = v[:, None]
        w = _exp_nilpotent(-f.a_op(self.h), v, f.cutoff)
        w = _exp_nilpotent(f.a_dag_op(self.h), w, f.cutoff)
        w *= np.exp(-0.5 * np.vdot(self.h, self.h).real)
        return w[:, 0] if squeeze else w

    def to_dense(self) -> np.ndarray:
        return self.apply(np.eye(self.fock.dim, dtype=complex))


def weyl_truncated(fock: TruncatedFock, h, tol: float = 1e-12, max_norm: float = 2.0) -> TruncatedWeyl:
    """Weyl operator of ``h in C^n_modes`` on the truncated Fock space.

    Raises:
        CutoffError: the coherent-vector remainder bound exceeds ``tol``;
            the message names the cutoff that would suffice.
        ValueError: ``||h|| > max_norm``.
    """
    h = np.asarray(h, dtype=complex)
    if h.shape != (fock.n_modes,):
        raise ValueError(f"h must have {fock.n_modes} complex components, got shape {h.shape}")
    nh = float(np.linalg.norm(h))
    if nh > max_norm:
        raise ValueError(f"||h|| = {nh:.3g} exceeds the supported bound {max_norm}")
    bound = truncation_remainder(nh, fock.cutoff)
    if bound > tol:
        need = required_cutoff(nh, tol)
        raise CutoffError(need, f"cutoff {fock.cutoff} leaves remainder {bound:.2e} > {tol:.1e}; need cutoff >= {need}")
    return TruncatedWeyl(fock, h)


def beta_complex(h, k) -> float:
    """``Im(h, k)`` with the scalar product antilinear in the first slot."""
    return float(np.vdot(h, k).imag)


def weyl_relation_residual(fock: TruncatedFock, h, k, max_particles: int = 5) -> float:
    """``||(V(h+k) - e^{i beta(h,k)} V(h) V(k)) P_n||`` on the n-particle sector."""
    cols = fock.sector(max_particles)
    basis = np.zeros((fock.dim, cols.size), dtype=complex)
    basis[cols, np.arange(cols.size)] = 1.0
    vh, vk = weyl_truncated(fock, h), weyl_truncated(fock, k)
    vhk = weyl_truncated(fock, np.asarray(h) + np.asarray(k))
    lhs = vhk.apply(basis)
    rhs = np.exp(1j * beta_complex(h, k)) * vh.apply(vk.apply(basis))
    return float(np.linalg.norm(lhs - rhs, 2))


def vacuum_kernel_residual(fock: TruncatedFock, h) -> float:
    """``|<e^0, V(h) e^0> - e^{-|h|^2/2}|``."""
    v = weyl_truncated(fock, h).apply(fock.vacuum())
    return float(abs(v[0] - np.exp(-0.5 * np.vdot(h, h).real)))


# ------------------------------------------------------ criterion chain


def _common_beta(a1: GaussianState, a2: GaussianState) -> None:
    b1, b2 = a1.abstract.B, a2.abstract.B
    if b1.shape != b2.shape or np.linalg.norm(b1 - b2) > 1e-12 * max(1.0, np.linalg.norm(b1)):
        raise ValueError("the two states must share the symplectic form beta")
    for st in (a1, a2):
        if not st.abstract.factorial:
            raise NotFactorialError("quasi-equivalence criteria need factorial subspaces")
        if not st.abstract.separating:
            raise NotFactorialError("quasi-equivalence criteria need separating subspaces")


class _Side:
    """Functions of one polariser, converted to raw coordinates."""

    def __init__(self, ab: AbstractSubspace):
        self.ab = ab
        self.d = ab.D

    def d_inv_frame(self) -> np.ndarray:
        return np.linalg.inv(self.d)

    def raw(self, frame: np.ndarray) -> np.ndarray:
        return self.ab.A_isqrt @ frame @ self.ab.A_sqrt

    def of_L(self, g) -> np.ndarray:
        """``g(L)|_H`` through the complexification calculus."""
        return self.raw(polariser_calculus(self.d, g))

    @cached_property
    def D(self):
        return self.raw(self.d)

    @cached_property
    def D_inv(self):
        return self.of_L(lambda t: -1j / np.tanh(t / 2))

    @cached_property
    def S(self):
        """``sqrt(1 + D^2) = 1/cosh(L/2)|_H``."""
        return self.of_L(lambda t: 1 / np.cosh(t / 2))

    @cached_property
    def DS(self):
        """``D^-1 sqrt(1 + D^2) = -i/sinh(L/2)|_H``."""
        return self.of_L(lambda t: -1j / np.sinh(t / 2))


def _hs(a1: AbstractSubspace, a2: AbstractSubspace, x: np.ndarray) -> float:
    return float(np.linalg.norm(a2.A_sqrt @ x @ a1.A_isqrt))


def theorem_operators(a1: GaussianState, a2: GaussianState) -> tuple[np.ndarray, np.ndarray]:
    """The two operators of the quasi-equivalence theorem (raw coordinates)."""
    _common_beta(a1, a2)
    s1, s2 = _Side(a1.abstract), _Side(a2.abstract)
    diff = s1.DS - s2.DS
    t1 = (s1.D_inv - s2.D_inv) - s2.S @ diff
    t2 = s2.D @ diff
    return t1, t2


def theorem_operators_bruteforce(a1: GaussianState, a2: GaussianState) -> tuple[np.ndarray, np.ndarray]:
    """Same operators from the raw polarisers ``A_k^-1 B`` and matrix square roots."""
    _common_beta(a1, a2)
    mats = []
    for st in (a1, a2):
        d = np.linalg.solve(st.abstract.A, st.abstract.B)
        s = np.real_if_close(sqrtm(np.eye(d.shape[0]) + d @ d), tol=1e6)
        mats.append((d, np.linalg.inv(d), np.asarray(s, dtype=float)))
    (d1, d1i, s1), (d2, d2i, s2) = mats
    diff = d1i @ s1 - d2i @ s2
    return (d1i - d2i) - s2 @ diff, d2 @ diff


def qe_theorem_norms(a1: GaussianState, a2: GaussianState) -> tuple[float, float]:
    """Hilbert-Schmidt norms of the two theorem conditions.

    Raises:
        ValueError: the states do not share beta.
        NotFactorialError: a subspace is not factorial.
    """
    t1, t2 = theorem_operators(a1, a2)
    return _hs(a1.abstract, a2.abstract, t1), _hs(a1.abstract, a2.abstract, t2)


@dataclass(frozen=True)
class ChainReport:
    values: dict
    identity_residuals: dict

    def to_json(self) -> str:
        rows = [{"criterion": k, "value": v, "identity_residuals": self.identity_residuals} for k, v in self.values.items()]
        return json.dumps(rows, indent=2)

    def checks(self, tol: float = 1e-9) -> list[IdentityCheck]:
        return [IdentityCheck(k, v, tol) for k, v in self.identity_residuals.items()]


def qe_corollary_chain(a1: GaussianState, a2: GaussianState) -> ChainReport:
    """Every criterion quantity, plus the matrix identities linking them.

    Residuals are relative: divided by ``max(1, ||D_1^-1||, ||D_2^-1||)^2``
    measured in the norm of the module docstring.
    """
    _common_beta(a1, a2)
    ab1, ab2 = a1.abstract, a2.abstract
    s1, s2 = _Side(ab1), _Side(ab2)
    n = ab1.n
    eye = np.eye(n)

    def hs(x):
        return _hs(ab1, ab2, x)

    d_inv_diff = s1.D_inv - s2.D_inv
    s_diff = s1.S - s2.S
    ds_diff = s1.DS - s2.DS
    ds2_s_diff = s2.DS @ s_diff
    d2_inv_s_diff = s2.D_inv @ s_diff
    t1 = d_inv_diff - s2.S @ ds_diff
    t2 = s2.D @ ds_diff
    sech_diff = s1.of_L(lambda t: 1 / np.cosh(t / 2)) - s2.of_L(lambda t: 1 / np.cosh(t / 2))
    sqrt_diff = s1.raw(psd_sqrt(np.eye(n) + s1.d @ s1.d)) - s2.raw(psd_sqrt(np.eye(n) + s2.d @ s2.d))
    coth_diff = s1.of_L(lambda t: 1j / np.tanh(t / 2)) - s2.of_L(lambda t: 1j / np.tanh(t / 2))
    csch_diff = s1.of_L(lambda t: 1j / np.sinh(t / 2)) - s2.of_L(lambda t: 1j / np.sinh(t / 2))
    coth4_diff = s1.of_L(lambda t: 1j / np.tanh(t / 4)) - s2.of_L(lambda t: 1j / np.tanh(t / 4))
    tanh4 = s1.of_L(lambda t: 1j * np.tanh(t / 4)) - s2.of_L(lambda t: 1j * np.tanh(t / 4))

    # cutting-projection routes in the symplectic dilations
    dil1, dil2 = symplectic_dilation(ab1), symplectic_dilation(ab2)
    h1, h2 = dil1.subspace, dil2.subspace
    p_i_1 = s1.raw(h1.restrict(cutting_P_direct(h1) @ h1.i_op))
    p_i_2 = s2.raw(h2.restrict(cutting_P_direct(h2) @ h2.i_op))
    p_i_diff = p_i_1 - p_i_2
    x_frame2 = ab2.A_sqrt @ s_diff @ ab2.A_isqrt
    p2 = cutting_P_direct(h2)
    pi_x = p2 @ h2.i_op @ h2.basis @ x_frame2
    p_i_s_diff = s2.raw(h2.basis.T @ pi_x)
    p_prime_i_x = (np.eye(p2.shape[0]) - p2) @ h2.i_op @ h2.basis @ x_frame2
    ds2_s_diff_via_p_prime = -s2.raw(h2.complement_basis.T @ p_prime_i_x)

    # A^-1 difference identity with A_k = i_k coth(L_k/4)|_H, inverses computed separately
    a_1 = s1.of_L(lambda t: 1j / np.tanh(t / 4))
    a_2 = s2.of_L(lambda t: 1j / np.tanh(t / 4))
    a_1_inv = s1.of_L(lambda t: -1j * np.tanh(t / 4))
    a_2_inv = s2.of_L(lambda t: -1j * np.tanh(t / 4))

    # scalar step on the spectra of both modular Hamiltonians
    lam = np.concatenate([np.log(h1.modular.delta_spectrum), np.log(h2.modular.delta_spectrum)])
    scalar_step = float(np.max(np.abs(1 / np.tanh(lam / 2) - np.tanh(lam / 2) - 2 / np.sinh(lam)), initial=0.0))

    scale = max(1.0, np.linalg.norm(s1.d_inv_frame(), 2), np.linalg.norm(s2.d_inv_frame(), 2)) ** 2
    res = {
        "D1^-1 - D2^-1 = P1 i1|_H - P2 i2|_H": hs(d_inv_diff - p_i_diff),
        "i coth(L/2) difference = -(D1^-1 - D2^-1)": hs(coth_diff + d_inv_diff),
        "sqrt(1+D^2) difference = sech(L/2) difference": hs(sqrt_diff - sech_diff),
        "sqrt(1+D^2) difference = S1 - S2": hs(sqrt_diff - s_diff),
        "D2^-1 S2 (S1 - S2) = S2 D2^-1 (S1 - S2)": hs(ds2_s_diff - s2.S @ d2_inv_s_diff),
        "D2^-1 S2 (S1 - S2) = -P2' i2 (S1 - S2)|_H": hs(ds2_s_diff - ds2_s_diff_via_p_prime),
        "D2^-1 (S1 - S2) = P2 i2 (S1 - S2)|_H": hs(d2_inv_s_diff - p_i_s_diff),
        "(D1^-1 S1 - D2^-1 S2) - D2^-1 (S1 - S2) = (D1^-1 - D2^-1) S1": hs(ds_diff - d2_inv_s_diff - d_inv_diff @ s1.S),
        "t1 = (D1^-1 - D2^-1) - S2 (D1^-1 S1 - D2^-1 S2)": hs(t1 - (d_inv_diff - s2.S @ ds_diff)),
        "t2 = D2 (D1^-1 - D2^-1) S1 + (S1 - S2)": hs(t2 - (s2.D @ d_inv_diff @ s1.S + s_diff)),
        "i/sinh(L/2) difference = -(D1^-1 S1 - D2^-1 S2)": hs(csch_diff + ds_diff),
        "i coth(L/4) - i tanh(L/4) difference = 2 i/sinh(L/2) difference": hs(coth4_diff - tanh4 - 2 * csch_diff),
        "coth(x/2) - tanh(x/2) = 2/sinh(x) on spec(L)": scalar_step,
        "A1 - A2 = A1 (A2^-1 - A1^-1) A2 for A = i coth(L/4)|_H": hs((a_1 - a_2) - a_1 @ (a_2_inv - a_1_inv) @ a_2),
        "D1 - D2 = D1 (D2^-1 - D1^-1) D2": hs((s1.D - s2.D) - s1.D @ (s2.D_inv - s1.D_inv) @ s2.D),
        "A_k A_k^-1 = 1": max(hs(a_1 @ a_1_inv - eye), hs(a_2 @ a_2_inv - eye)),
    }
    res = {k: v / scale for k, v in res.items()}
    values = {
        "t1": hs(t1),
        "t2": hs(t2),
        "D_inv_diff": hs(d_inv_diff),
        "D2_inv_S2_S_diff": hs(ds2_s_diff),
        "S_diff": hs(s_diff),
        "D_inv_S_diff": hs(ds_diff),
        "D2_inv_S_diff": hs(d2_inv_s_diff),
        "sech_half_L_diff": hs(sech_diff),
        "csch_half_L_diff": hs(csch_diff),
        "coth_quarter_L_diff": hs(coth4_diff),
    }
    return ChainReport(values, res)


def random_state_pair(n: int, rng: np.random.Generator, spread: float = 0.5) -> tuple[GaussianState, GaussianState]:
    """Two Gaussian states sharing beta; ``alpha_2 = alpha_1 + W W^T``."""
    from .dilation import random_abstract_subspace

    ab1 = random_abstract_subspace(n, rng)
    w = rng.standard_normal((n, n)) * spread / np.sqrt(n)
    a2 = ab1.A + w @ w.T
    ab2 = abstract_subspace(0.5 * (a2 + a2.T), ab1.B)
    return GaussianState(ab1), GaussianState(ab2)
