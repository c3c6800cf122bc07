"""Real-linear operators on realified complex spaces.

A complex space of dimension N is modelled as R^{2N} with the Euclidean
inner product standing for ``Re(., .)`` and an explicit orthogonal complex
structure ``i_op``.  The imaginary part of the (antilinear-in-the-first-slot)
scalar product is then ``Im(x, y) = -Re(x, i y)``.

Operators are plain ``numpy`` arrays written in an orthonormal basis, so the
real adjoint is the transpose.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

DEFAULT_TOL = 1e-9


def standard_complex_structure(n_complex: int) -> np.ndarray:
    """Multiplication by i on C^N written in (Re, Im) coordinates."""
    eye = np.eye(n_complex)
    zero = np.zeros((n_complex, n_complex))
    return np.block([[zero, -eye], [eye, zero]])


@dataclass(frozen=True)
class RealifiedSpace:
    """R^{2N} with an orthogonal complex structure.

    Attributes:
        i_op: real 2N x 2N matrix with ``i_op @ i_op == -1`` and
            ``i_op.T == -i_op``.
    """

    i_op: np.ndarray = field(repr=False)

    def __post_init__(self):
        i_op = np.asarray(self.i_op, dtype=float)
        if i_op.ndim != 2 or i_op.shape[0] != i_op.shape[1] or i_op.shape[0] % 2:
            raise ValueError(f"complex structure must be an even square matrix, got {i_op.shape}")
        eye = np.eye(i_op.shape[0])
        sq = np.linalg.norm(i_op @ i_op + eye)
        orth = np.linalg.norm(i_op.T @ i_op - eye)
        if sq > 1e-10 or orth > 1e-10:
            raise ValueError(f"not an orthogonal complex structure (|i^2+1|={sq:.2e}, |i^T i-1|={orth:.2e})")
        i_op.setflags(write=False)
        object.__setattr__(self, "i_op", i_op)

    @classmethod
    def standard(cls, n_complex: int) -> "RealifiedSpace":
        return cls(standard_complex_structure(n_complex))

    @property
    def real_dim(self) -> int:
        return self.i_op.shape[0]

    @property
    def n_complex(self) -> int:
        return self.real_dim // 2

    def alpha(self, x, y) -> float:
        """Real part of the scalar product."""
        return float(np.dot(x, y))

    def beta(self, x, y) -> float:
        """Imaginary part of the scalar product."""
        return float(-np.dot(x, self.i_op @ y))

    def complex_frame(self) -> np.ndarray:
        """Orthogonal W with ``i_op @ W == W @ standard_complex_structure(N)``.

        Columns are ``[e_1..e_N, i e_1..i e_N]`` for an orthonormal complex
        basis ``e_k``.
        """
        n = self.n_complex
        dim = self.real_dim
        first = []
        basis = np.zeros((dim, 0))
        for k in range(dim):
            v = np.eye(dim)[:, k]
            v = v - basis @ (basis.T @ v)
            v = v - basis @ (basis.T @ v)
            nv = np.linalg.norm(v)
            if nv < 1e-8:
                continue
            v = v / nv
            first.append(v)
            basis = np.column_stack([basis, v, self.i_op @ v])
            if len(first) == n:
                break
        e = np.column_stack(first)
        return np.column_stack([e, self.i_op @ e])


def real_adjoint(t: np.ndarray) -> np.ndarray:
    """Adjoint with respect to ``Re(., .)``; the transpose in an orthonormal basis."""
    t = np.asarray(t, dtype=float)
    if t.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {t.shape}")
    return t.T.copy()


def polar_decompose(t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(V, P)`` with ``t = V @ P`` and ``P = (t^T t)^{1/2}``."""
    t = np.asarray(t, dtype=float)
    if t.ndim != 2 or t.shape[0] != t.shape[1]:
        raise ValueError(f"polar decomposition needs a square matrix, got {t.shape}")
    u, s, wt = np.linalg.svd(t)
    p = (wt.T * s) @ wt
    v = u @ wt
    return v, 0.5 * (p + p.T)


def schatten_norm(t: np.ndarray, p: float = 2.0) -> float:
    """Schatten p-norm with respect to the real inner product."""
    if p < 1:
        raise ValueError(f"Schatten index must be >= 1, got {p}")
    t = np.asarray(t, dtype=float)
    if t.size == 0:
        return 0.0
    if p == 2:
        return float(np.linalg.norm(t))
    s = np.linalg.svd(t, compute_uv=False)
    if np.isinf(p):
        return float(s.max())
    return float(np.sum(s**p) ** (1.0 / p))


def hs_norm(t: np.ndarray) -> float:
    return schatten_norm(t, 2)


def commutator_with_i(t: np.ndarray, i_op: np.ndarray) -> np.ndarray:
    """``[T, i] = T i - i T``."""
    return t @ i_op - i_op @ t


def anticommutator_with_i(t: np.ndarray, i_op: np.ndarray) -> np.ndarray:
    return t @ i_op + i_op @ t


def is_complex_linear(t, i_op, tol: float = DEFAULT_TOL) -> bool:
    return bool(np.linalg.norm(commutator_with_i(t, i_op)) <= tol * max(1.0, np.linalg.norm(t)))


def is_antilinear(t, i_op, tol: float = DEFAULT_TOL) -> bool:
    return bool(np.linalg.norm(anticommutator_with_i(t, i_op)) <= tol * max(1.0, np.linalg.norm(t)))


def shale_identity_residual(t: np.ndarray, i_op: np.ndarray) -> float:
    """Operator-norm residual of ``[T, i] = T i (1 - T^* T)`` for symplectic ``T``."""
    eye = np.eye(t.shape[0])
    lhs = commutator_with_i(t, i_op)
    rhs = t @ i_op @ (eye - t.T @ t)
    return float(np.linalg.norm(lhs - rhs, 2))


def sym_function(a: np.ndarray, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Spectral calculus for a real symmetric matrix."""
    a = 0.5 * (a + a.T)
    w, v = np.linalg.eigh(a)
    return (v * f(w)) @ v.T


def psd_sqrt(a: np.ndarray) -> np.ndarray:
    return sym_function(a, lambda w: np.sqrt(np.clip(w, 0.0, None)))


def hermitian_generator(k: np.ndarray) -> np.ndarray:
    """``A = -iota K`` on the complexification, as a complex Hermitian matrix.

    The complexification of R^n is identified with C^n; a real operator is
    promoted by acting on real and imaginary parts separately.
    """
    k = np.asarray(k, dtype=float)
    return -1j * k


def borel_calculus_real(k: np.ndarray, f: Callable[[np.ndarray], np.ndarray], tol: float = 1e-8) -> np.ndarray:
    """Apply ``f`` to a skew-adjoint real operator through complexification.

    ``K`` is promoted to C^n, ``A = -iota K`` is Hermitian there, ``f(A)`` is
    formed by the usual spectral calculus and restricted back to R^n.  The
    restriction is real exactly when ``f(-t) = conj(f(t))`` on the spectrum.

    Raises:
        ValueError: ``K`` not skew-adjoint, or ``f`` lacks the reality
            symmetry on the spectrum of ``A``.
    """
    k = np.asarray(k, dtype=float)
    scale = max(1.0, np.linalg.norm(k))
    if np.linalg.norm(k + k.T) > tol * scale:
        raise ValueError("borel_calculus_real needs a skew-adjoint operator")
    a = hermitian_generator(0.5 * (k - k.T))
    w, v = np.linalg.eigh(a)
    fw = np.asarray(f(w), dtype=complex)
    # spectrum of A is symmetric about 0; compare f(-t) with conj f(t)
    fw_neg = np.asarray(f(-w), dtype=complex)
    mismatch = np.max(np.abs(fw_neg - np.conj(fw)), initial=0.0)
    if mismatch > tol * max(1.0, np.max(np.abs(fw), initial=0.0)):
        raise ValueError(f"function lacks the symmetry f(-t) = conj f(t) on the spectrum (mismatch {mismatch:.2e})")
    out = (v * fw) @ v.conj().T
    return out.real.copy()


def polariser_calculus(d: np.ndarray, g: Callable[[np.ndarray], np.ndarray], tol: float = 1e-8) -> np.ndarray:
    """``g(L)|_H`` computed from the polariser alone.

    With ``D = i tanh(L/2)|_H`` the complexified polariser satisfies
    ``-iota D = tanh(L/2)``, so ``g(L) = g(2 artanh(-iota D))``.  ``g`` must
    satisfy ``g(-t) = conj g(t)``.
    """
    return borel_calculus_real(d, lambda a: g(2.0 * np.arctanh(a)), tol=tol)


def skew_canonical_form(d: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Orthogonal O and sigma >= 0 with ``O^T D O = ⊕_k [[0, sigma_k], [-sigma_k, 0]]``.

    Zero singular values (odd dimension, or a kernel) come last.
    """
    from scipy.linalg import schur

    d = np.asarray(d, dtype=float)
    d = 0.5 * (d - d.T)
    t, o = schur(d, output="real")
    n = d.shape[0]
    thresh = 1e-14 * max(1.0, np.abs(t).max(initial=0.0))
    pairs, singles, sigma = [], [], []
    k = 0
    while k < n:
        if k + 1 < n and abs(t[k + 1, k]) > thresh:
            # orient each block so the upper entry is positive
            pairs += [k, k + 1] if t[k, k + 1] > 0 else [k + 1, k]
            sigma.append(abs(t[k, k + 1]))
            k += 2
        else:
            singles.append(k)
            k += 1
    return o[:, pairs + singles], np.array(sigma)


def random_symplectic(omega: np.ndarray, rng: np.random.Generator, scale: float = 0.5) -> np.ndarray:
    """Random T with ``T^T omega T = omega`` for an invertible skew ``omega``.

    ``T = exp(omega^-1 S)`` with S a random symmetric matrix; the generator is
    rescaled to operator norm ``scale``.
    """
    from scipy.linalg import expm

    n = omega.shape[0]
    s = rng.standard_normal((n, n))
    s = 0.5 * (s + s.T)
    x = np.linalg.solve(omega, s)
    x *= scale / np.linalg.norm(x, 2)
    return expm(x)
