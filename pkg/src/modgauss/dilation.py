"""Abstract standard subspaces and their two dilations.

An abstract subspace is R^n with a Gram pair: ``A`` for the real scalar
product alpha and ``B`` for the symplectic form beta.  The polariser is the
skew operator D with ``beta(h, k) = alpha(h, D k)``; it is stored in the
alpha-orthonormal frame ``u = A^{1/2} h``, where it reads
``A^{-1/2} B A^{-1/2}``.

Both dilations realise the abstract triple as a standard subspace ``κ(R^n)``
of a complex space of real dimension 2n:

* orthogonal: R^n ⊕ R^n with the Euclidean metric and a complex structure
  assembled from D and ``V sqrt(1 + D^2)`` (V the phase of D);
* symplectic: R^n ⊕ R^n with ``beta ⊕ -beta`` and a complex structure
  assembled from ``D^-1`` and ``D^-1 sqrt(1 + D^2)``; the metric is derived
  from the form and the complex structure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .realop import RealifiedSpace, psd_sqrt, sym_function
from .reports import IdentityCheck, residual
from .stdspace import NotFactorialError, NotStandardError, StandardSubspace, standard_subspace_from_basis

COMPAT_TOL = 1e-12
KERNEL_TOL = 1e-12


class CompatibilityError(ValueError):
    pass


@dataclass(frozen=True)
class AbstractSubspace:
    """Real space R^n with Gram matrices ``A`` (alpha) and ``B`` (beta)."""

    A: np.ndarray = field(repr=False)
    B: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @cached_property
    def A_sqrt(self) -> np.ndarray:
        return psd_sqrt(self.A)

    @cached_property
    def A_isqrt(self) -> np.ndarray:
        return sym_function(self.A, lambda w: 1.0 / np.sqrt(w))

    @cached_property
    def D(self) -> np.ndarray:
        """Polariser in the alpha-orthonormal frame."""
        d = self.A_isqrt @ self.B @ self.A_isqrt
        return 0.5 * (d - d.T)

    @cached_property
    def D_raw(self) -> np.ndarray:
        """Polariser as an operator on the original coordinates, ``A^-1 B``."""
        return np.linalg.solve(self.A, self.B)

    @cached_property
    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.D, compute_uv=False)

    @property
    def separating(self) -> bool:
        return bool(self.singular_values.max(initial=0.0) < 1.0 - COMPAT_TOL)

    @property
    def factorial(self) -> bool:
        return bool(self.n > 0 and self.singular_values.min() > KERNEL_TOL)

    def alpha(self, h, k) -> float:
        return float(np.asarray(h) @ self.A @ np.asarray(k))

    def beta(self, h, k) -> float:
        return float(np.asarray(h) @ self.B @ np.asarray(k))

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "A": self.A.ravel().tolist(), "B": self.B.ravel().tolist()})

    @classmethod
    def from_json(cls, text: str) -> "AbstractSubspace":
        data = json.loads(text)
        n = int(data["n"])
        return abstract_subspace(np.reshape(data["A"], (n, n)), np.reshape(data["B"], (n, n)))


def abstract_subspace(a, b) -> AbstractSubspace:
    """Validate a Gram pair.

    Raises:
        CompatibilityError: A not symmetric positive-definite, B not
            antisymmetric, or ``beta^2 <= alpha alpha`` violated.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape != b.shape:
        raise ValueError(f"Gram matrices must be square and of equal shape, got {a.shape} and {b.shape}")
    if np.linalg.norm(a - a.T) > 1e-12 * max(1.0, np.linalg.norm(a)):
        raise CompatibilityError("alpha Gram matrix is not symmetric")
    if np.linalg.norm(b + b.T) > 1e-12 * max(1.0, np.linalg.norm(b)):
        raise CompatibilityError("beta Gram matrix is not antisymmetric")
    a = 0.5 * (a + a.T)
    b = 0.5 * (b - b.T)
    if a.size and np.linalg.eigvalsh(a).min() <= 0:
        raise CompatibilityError("alpha Gram matrix is not positive-definite")
    out = AbstractSubspace(a, b)
    norm = out.singular_values.max(initial=0.0)
    if norm > 1.0 + COMPAT_TOL:
        raise CompatibilityError(f"beta not compatible with alpha: ||D|| = {norm!r} > 1")
    return out


def random_abstract_subspace(
    n: int,
    rng: np.random.Generator,
    sigma_range: tuple[float, float] = (0.1, 0.9),
    alpha_condition: float = 4.0,
    kernel_dim: int = 0,
) -> AbstractSubspace:
    """Sample a compatible pair with polariser singular values in ``sigma_range``.

    ``kernel_dim`` directions are left in ker D; ``n - kernel_dim`` must be
    even.
    """
    m = n - kernel_dim
    if m % 2:
        raise ValueError(f"the nondegenerate part needs even dimension, got {m}")
    o, _ = np.linalg.qr(rng.standard_normal((n, n)))
    d0 = np.zeros((n, n))
    sig = rng.uniform(*sigma_range, size=m // 2)
    for k, s in enumerate(sig):
        d0[2 * k, 2 * k + 1] = s
        d0[2 * k + 1, 2 * k] = -s
    d_on = o @ d0 @ o.T
    p, _ = np.linalg.qr(rng.standard_normal((n, n)))
    ev = np.exp(rng.uniform(0.0, np.log(alpha_condition), size=n))
    a = (p * ev) @ p.T
    a = 0.5 * (a + a.T)
    a_half = psd_sqrt(a)
    b = a_half @ d_on @ a_half
    return abstract_subspace(a, 0.5 * (b - b.T))


@dataclass(frozen=True)
class Dilation:
    """A one-particle structure: ambient space, ``κ`` and the image subspace.

    ``kappa`` has shape (2n, n) and maps original coordinates of the abstract
    space into the ambient orthonormal coordinates.  ``subspace.basis`` is
    ``kappa A^{-1/2}``, so matrices on H read in ``subspace.basis`` are
    directly comparable with ``abstract.D``.
    """

    abstract: AbstractSubspace
    space: RealifiedSpace
    kappa: np.ndarray = field(repr=False)
    subspace: StandardSubspace
    kind: str

    def checks(self, tol: float = 1e-10) -> list[IdentityCheck]:
        """One-particle axioms and the polariser match."""
        k, i_op, ab = self.kappa, self.space.i_op, self.abstract
        ambient_dim = i_op.shape[0]
        rank = np.linalg.matrix_rank(np.column_stack([k, i_op @ k]))
        return [
            IdentityCheck("iota^2 = -1", residual(i_op @ i_op, -np.eye(ambient_dim)), tol),
            IdentityCheck("Re(κh, κk) = alpha(h, k)", residual(k.T @ k, ab.A), tol * max(1.0, np.linalg.norm(ab.A))),
            IdentityCheck("Im(κh, κk) = beta(h, k)", residual(-k.T @ i_op @ k, ab.B), tol * max(1.0, np.linalg.norm(ab.A))),
            IdentityCheck("κ(H) + iκ(H) spans", float(ambient_dim - rank), 0.5),
            IdentityCheck("embedded polariser = D", residual(self.subspace.polariser, ab.D), tol),
        ]


def _phase(d: np.ndarray) -> np.ndarray:
    """Partial isometry V with ``D = V |D|``; zero on ker D."""
    abs_d = psd_sqrt(d.T @ d)
    return d @ np.linalg.pinv(abs_d, rcond=KERNEL_TOL, hermitian=True)


def _make_subspace(space: RealifiedSpace, basis: np.ndarray) -> StandardSubspace:
    return standard_subspace_from_basis(space, basis)


def orthogonal_dilation(ab: AbstractSubspace) -> Dilation:
    """Orthogonal dilation on R^n ⊕ R^n with the Euclidean metric.

    The complex structure is ``[[-D, W], [-W^T, D]]`` with
    ``W = -(V sqrt(1 + D^2) + P_ker)``.  On ker D this is the plain
    complexification, so a degenerate beta is split off as ker D ⊕ ran D.

    Raises:
        NotStandardError: ``ker(1 + D^2) != 0``; κ(H) would not be cyclic.
    """
    if not ab.separating:
        raise NotStandardError(
            f"ker(1 + D^2) != 0 (||D|| = {ab.singular_values.max():.6g}); the dilated subspace would not be cyclic"
        )
    n = ab.n
    d = ab.D
    eye = np.eye(n)
    v = _phase(d)
    p_ker = eye - v.T @ v
    p_ker = 0.5 * (p_ker + p_ker.T)
    w = -(v @ psd_sqrt(eye + d @ d) + p_ker)
    iota = np.block([[-d, w], [-w.T, d]])
    space = RealifiedSpace(iota)
    kappa = np.vstack([ab.A_sqrt, np.zeros((n, n))])
    sub = _make_subspace(space, np.vstack([eye, np.zeros((n, n))]))
    return Dilation(ab, space, kappa, sub, "orthogonal")


def symplectic_dilation(ab: AbstractSubspace) -> Dilation:
    """Symplectic dilation on R^n ⊕ R^n with the form ``beta ⊕ -beta``.

    The metric ``alpha_hat(x, y) = beta_hat(x, iota y)`` is not Euclidean in
    the doubled coordinates; the returned space uses coordinates
    ``y = alpha_hat^{1/2} x`` in which it is.

    Raises:
        NotFactorialError: D is singular.
    """
    if not ab.factorial:
        raise NotFactorialError("symplectic dilation needs an invertible polariser (factorial input)")
    if not ab.separating:
        raise NotStandardError("ker(1 + D^2) != 0")
    n = ab.n
    d = ab.D
    d_inv = np.linalg.inv(d)
    s = psd_sqrt(np.eye(n) + d @ d)
    iota = np.block([[d_inv, d_inv @ s], [-d_inv @ s, -d_inv]])
    beta_hat = np.block([[d, np.zeros((n, n))], [np.zeros((n, n)), -d]])
    alpha_hat = beta_hat @ iota
    alpha_hat = 0.5 * (alpha_hat + alpha_hat.T)
    g = psd_sqrt(alpha_hat)
    g_inv = np.linalg.inv(g)
    space = RealifiedSpace(g @ iota @ g_inv)
    basis = g @ np.vstack([np.eye(n), np.zeros((n, n))])
    kappa = basis @ ab.A_sqrt
    sub = _make_subspace(space, basis)
    return Dilation(ab, space, kappa, sub, "symplectic")


def symplectic_dilation_checks(ab: AbstractSubspace, tol: float = 1e-10) -> list[IdentityCheck]:
    """Checks in the doubled coordinates, before the change to a Euclidean frame."""
    n = ab.n
    d = ab.D
    d_inv = np.linalg.inv(d)
    s = psd_sqrt(np.eye(n) + d @ d)
    iota = np.block([[d_inv, d_inv @ s], [-d_inv @ s, -d_inv]])
    beta_hat = np.block([[d, np.zeros((n, n))], [np.zeros((n, n)), -d]])
    alpha_hat = beta_hat @ iota
    scale = max(1.0, np.linalg.norm(iota))
    ev = np.linalg.eigvalsh(0.5 * (alpha_hat + alpha_hat.T))
    return [
        IdentityCheck("iota^2 = -1", residual(iota @ iota, -np.eye(2 * n)), tol * scale**2),
        IdentityCheck("beta_hat(iota x, iota y) = beta_hat(x, y)", residual(iota.T @ beta_hat @ iota, beta_hat), tol * scale**2),
        IdentityCheck("alpha_hat symmetric", residual(alpha_hat, alpha_hat.T), tol * scale),
        IdentityCheck("alpha_hat positive", max(0.0, -ev.min()), 0.0),
        IdentityCheck("iota orthogonal for alpha_hat", residual(iota.T @ alpha_hat @ iota, alpha_hat), tol * scale**2),
    ]


def alpha_hat_condition(ab: AbstractSubspace) -> float:
    """Condition number of the symplectic-dilation metric."""
    n = ab.n
    d = ab.D
    d_inv = np.linalg.inv(d)
    s = psd_sqrt(np.eye(n) + d @ d)
    iota = np.block([[d_inv, d_inv @ s], [-d_inv @ s, -d_inv]])
    beta_hat = np.block([[d, np.zeros((n, n))], [np.zeros((n, n)), -d]])
    return float(np.linalg.cond(beta_hat @ iota))


def one_particle_unitary(k1: Dilation, k2: Dilation, tol: float = 1e-9) -> np.ndarray:
    """Complex-linear unitary U with ``U κ1(h) = κ2(h)``.

    Raises:
        ValueError: the two embeddings reproduce different (alpha, beta).
    """
    a1, a2 = k1.kappa, k2.kappa
    i1, i2 = k1.space.i_op, k2.space.i_op
    if a1.shape != a2.shape:
        raise ValueError(f"embeddings of different shape: {a1.shape} vs {a2.shape}")
    scale = max(1.0, np.linalg.norm(a1.T @ a1))
    ga = residual(a1.T @ a1, a2.T @ a2)
    gb = residual(a1.T @ i1 @ a1, a2.T @ i2 @ a2)
    if ga > tol * scale or gb > tol * scale:
        raise ValueError(f"embeddings are not one-particle structures of the same (alpha, beta): {ga:.2e}, {gb:.2e}")
    m1 = np.column_stack([a1, i1 @ a1])
    m2 = np.column_stack([a2, i2 @ a2])
    return m2 @ np.linalg.inv(m1)


def to_standard_space(dil: Dilation, rng: np.random.Generator | None = None) -> Dilation:
    """Move a dilation to C^N with the standard complex structure.

    A complex frame of the ambient space is chosen, optionally followed by a
    Haar-random unitary so that the subspace sits in generic position.
    """
    w = dil.space.complex_frame()
    n = dil.space.n_complex
    u = np.eye(2 * n)
    if rng is not None:
        z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
        qz, rz = np.linalg.qr(z)
        qz = qz * (np.diag(rz) / np.abs(np.diag(rz)))
        u = np.block([[qz.real, -qz.imag], [qz.imag, qz.real]])
    t = u @ w.T
    space = RealifiedSpace.standard(n)
    sub = _make_subspace(space, t @ dil.subspace.basis)
    return Dilation(dil.abstract, space, t @ dil.kappa, sub, dil.kind + "+standard")


def random_factorial_subspace(n_complex: int, rng: np.random.Generator, **kwargs) -> StandardSubspace:
    """A factorial standard subspace of C^N in generic position."""
    ab = random_abstract_subspace(n_complex, rng, **kwargs)
    return to_standard_space(orthogonal_dilation(ab), rng).subspace
