"""Test problems with prescribed conditioning, and accuracy metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .core import BOperator, as_matrix, as_operator, spectral_norm
from .errors import ContractViolation, ZeroInput

__all__ = [
    "ProblemSpec",
    "random_unitary",
    "gen_spd",
    "gen_conditioned",
    "build_rank_deficient",
    "loss_of_orthogonality",
    "relative_residual",
    "condition_number",
]


@dataclass(frozen=True)
class ProblemSpec:
    n: int
    k: int
    log_kappa_b: float = 5.0
    log_kappa_x: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.k <= self.n:
            raise ContractViolation(f"need 0 <= k <= n, got k={self.k}, n={self.n}")
        if self.log_kappa_b < 0 or self.log_kappa_x < 0:
            raise ContractViolation("log condition numbers must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise ContractViolation("seed must fit in 64 unsigned bits")

    def operator(self) -> BOperator:
        return gen_spd(self.n, self.log_kappa_b, self.seed)

    def matrix(self) -> np.ndarray:
        return gen_conditioned(self.n, self.k, self.log_kappa_x, self.seed)


def random_unitary(rows, cols, seed, stream) -> np.ndarray:
    """Orthonormal columns from the QR factorization of a complex Gaussian matrix."""
    g = rng.complex_gaussian(seed, stream, rows, cols)
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    phases = np.where(d == 0, 1.0, d / np.where(d == 0, 1.0, np.abs(d)))
    return q * phases[None, :]


def gen_spd(n, log_kappa, seed) -> BOperator:
    """Hermitian positive definite ``B = Q diag(10^0 .. 10^-log_kappa) Q^H``.

    The ``n`` eigenvalues are geometrically spaced; ``Q`` is a seeded
    random unitary matrix.
    """
    if log_kappa < 0:
        raise ContractViolation("log_kappa must be >= 0")
    q = random_unitary(n, n, seed, rng.STREAM_B)
    lam = np.logspace(0, -log_kappa, n)
    return BOperator.explicit((q * lam[None, :]) @ q.conj().T)


def gen_conditioned(n, k, log_kappa, seed) -> np.ndarray:
    """``X = U diag(sigma) V`` with ``k`` singular values from 1 down to ``10^-log_kappa``.

    ``U`` (n x k, orthonormal) and ``V`` (k x k, unitary) depend only on
    ``seed``, so a sweep over ``log_kappa`` reuses the same singular vectors.
    """
    if not 0 <= k <= n:
        raise ContractViolation(f"need k <= n, got k={k}, n={n}")
    if log_kappa < 0:
        raise ContractViolation("log_kappa must be >= 0")
    u = random_unitary(n, k, seed, rng.STREAM_X_LEFT)
    v = random_unitary(k, k, seed, rng.STREAM_X_RIGHT)
    sigma = np.logspace(0, -log_kappa, k)
    return (u * sigma[None, :]) @ v


def build_rank_deficient(x0) -> np.ndarray:
    """``[X0, 0 * X0, X0]``: rank deficient, with an exactly zero middle block."""
    x0 = as_matrix(x0, name="X0")
    return np.hstack([x0, np.zeros_like(x0), x0])


def loss_of_orthogonality(q, b) -> float:
    """``||Q^H B Q - I||_2``."""
    b = as_operator(b)
    q = as_matrix(q, name="Q", check_finite=False)
    if q.shape[0] != b.dim:
        raise ContractViolation(f"Q has {q.shape[0]} rows, B has dimension {b.dim}")
    g = q.conj().T @ b.apply(q)
    return spectral_norm(g - np.eye(q.shape[1]))


def relative_residual(x, q, r) -> float:
    """``||X - Q R||_2 / ||X||_2``.

    Raises
    ------
    ZeroInput
        If ``X`` is zero.
    """
    x = as_matrix(x, name="X", check_finite=False)
    q = as_matrix(q, name="Q", check_finite=False)
    r = np.asarray(r, dtype=np.complex128).reshape(q.shape[1], x.shape[1])
    nx = spectral_norm(x)
    if nx == 0.0:
        raise ZeroInput("relative residual of a zero matrix")
    return spectral_norm(x - q @ r) / nx


def condition_number(m, hermitian=False) -> float:
    """``sigma_max / sigma_min`` from a full singular value computation.

    For Hermitian input the singular values are taken as ``|eig|``.
    Returns ``inf`` when the smallest singular value is zero.
    """
    if isinstance(m, BOperator):
        m, hermitian = m.dense(), True
    m = np.asarray(m, dtype=np.complex128)
    if hermitian:
        s = np.abs(np.linalg.eigvalsh(m))
    else:
        s = np.linalg.svd(m, compute_uv=False)
    smin = s.min()
    return float(s.max() / smin) if smin > 0 else float("inf")
