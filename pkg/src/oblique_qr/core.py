"""Dense matrices, the B operator, B-inner products and small kernels.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``. Real
input is embedded with zero imaginary part. The B operator is either an
explicit Hermitian positive definite matrix or a black-box product
``x -> B x``.
"""

from __future__ import annotations

import warnings
from typing import Callable, Optional

import numpy as np
from scipy.linalg import blas, lapack

from .errors import ContractViolation, IndefinitenessWarning, NonFiniteInput, NotPositiveDefinite

__all__ = [
    "BOperator",
    "as_matrix",
    "as_operator",
    "apply_b",
    "b_inner",
    "b_norm",
    "cholesky",
    "spectral_norm",
]

_POWER_TOL = 1e-12
_POWER_MAXITER = 10_000
# Inputs with both dimensions at most this size always go through the SVD.
_SVD_CUTOFF = 64


def as_matrix(a, *, name="matrix", check_finite=True) -> np.ndarray:
    """Return ``a`` as a 2-D complex128 array (vectors become one column)."""
    m = np.asarray(a)
    if m.ndim == 1:
        m = m[:, None]
    if m.ndim != 2:
        raise ContractViolation(f"{name} must be 1-D or 2-D, got shape {m.shape}")
    m = np.asfortranarray(m, dtype=np.complex128)
    if check_finite and not np.all(np.isfinite(m)):
        raise NonFiniteInput(f"{name} contains NaN or Inf entries")
    return m


class BOperator:
    """The weight of the inner product ``<x, y>_B = y^H B x``.

    Build one with :meth:`explicit` or :meth:`from_callback`; a bare
    ndarray is accepted anywhere an operator is expected and is wrapped
    with :meth:`explicit`.

    Explicit matrices are symmetrized as ``(B + B^H) / 2`` on construction.
    Callback operators are Hermitian positive definite by contract. A
    callback is invoked once per column unless ``vectorized=True``, in
    which case it receives the whole block.
    """

    __slots__ = ("_dim", "_matrix", "_callback", "_vectorized", "_norm_estimate")

    def __init__(self, dim, matrix=None, callback=None, vectorized=False):
        if (matrix is None) == (callback is None):
            raise ContractViolation("BOperator needs exactly one of matrix or callback")
        self._dim = int(dim)
        self._matrix = matrix
        self._callback = callback
        self._vectorized = bool(vectorized)
        self._norm_estimate = None

    @classmethod
    def explicit(cls, matrix) -> "BOperator":
        b = as_matrix(matrix, name="B")
        if b.shape[0] != b.shape[1]:
            raise ContractViolation(f"B must be square, got shape {b.shape}")
        b = np.asfortranarray((b + b.conj().T) / 2)
        b.setflags(write=False)
        return cls(b.shape[0], matrix=b)

    @classmethod
    def from_callback(cls, fn: Callable[[np.ndarray], np.ndarray], dim: int, vectorized=False) -> "BOperator":
        return cls(dim, callback=fn, vectorized=vectorized)

    @classmethod
    def identity(cls, n) -> "BOperator":
        return cls.explicit(np.eye(n))

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def is_explicit(self) -> bool:
        return self._matrix is not None

    @property
    def matrix(self) -> Optional[np.ndarray]:
        """The (read-only, symmetrized) matrix, or ``None`` for callbacks."""
        return self._matrix

    def __repr__(self):
        form = "explicit" if self.is_explicit else "callback"
        return f"BOperator(dim={self._dim}, form={form})"

    def apply(self, m: np.ndarray) -> np.ndarray:
        """Return ``B @ m`` for a vector or a matrix, without input validation.

        Explicit B multiplies vectors with ``zhemv`` (one triangle is read;
        B is exactly Hermitian after symmetrization) and blocks with a
        dense product.
        """
        if self._matrix is not None:
            if m.ndim == 1:
                return blas.zhemv(1.0, self._matrix, m)
            return self._matrix @ m
        if m.ndim == 1 or self._vectorized:
            return np.asarray(self._callback(m), dtype=np.complex128)
        out = np.empty(m.shape, dtype=np.complex128, order="F")
        for j in range(m.shape[1]):
            out[:, j] = self._callback(m[:, j])
        return out

    def dense(self) -> np.ndarray:
        """The matrix of B, assembling it column by column for callbacks."""
        if self._matrix is not None:
            return self._matrix
        return self.apply(np.eye(self._dim, dtype=np.complex128))

    def leading_block(self, k) -> np.ndarray:
        """``E_k^H B E_k``: sliced for explicit B, k products for callbacks."""
        if self._matrix is not None:
            return np.array(self._matrix[:k, :k])
        e = np.zeros((self._dim, k), dtype=np.complex128)
        e[np.arange(k), np.arange(k)] = 1.0
        return self.apply(e)[:k, :]

    def norm_estimate(self) -> float:
        """Cheap estimate of ``||B||_2`` (power iteration, cached)."""
        if self._norm_estimate is None:
            x = np.ones(self._dim, dtype=np.complex128) / np.sqrt(max(self._dim, 1))
            lam = 0.0
            for _ in range(200):
                y = self.apply(x)
                ny = np.linalg.norm(y)
                if ny == 0.0:
                    break
                x = y / ny
                if abs(ny - lam) <= 1e-6 * ny:
                    lam = ny
                    break
                lam = ny
            self._norm_estimate = float(lam)
        return self._norm_estimate


def as_operator(b) -> BOperator:
    if isinstance(b, BOperator):
        return b
    return BOperator.explicit(b)


def apply_b(b, m) -> np.ndarray:
    """Compute ``B @ M``.

    Raises
    ------
    ContractViolation
        If ``M`` does not have ``B.dim`` rows.
    """
    b = as_operator(b)
    mm = np.asarray(m, dtype=np.complex128)
    if mm.ndim not in (1, 2) or mm.shape[0] != b.dim:
        raise ContractViolation(f"operand has shape {mm.shape}, B has dimension {b.dim}")
    return b.apply(mm)


def _vector(x, n, name):
    v = np.asarray(x, dtype=np.complex128).reshape(-1)
    if v.shape[0] != n:
        raise ContractViolation(f"{name} has length {v.shape[0]}, B has dimension {n}")
    return v


def b_inner(x, y, b) -> complex:
    """``<x, y>_B = y^H (B x)``."""
    b = as_operator(b)
    x = _vector(x, b.dim, "x")
    y = _vector(y, b.dim, "y")
    return complex(np.vdot(y, b.apply(x)))


def b_norm(x, b) -> float:
    """``||x||_B``, clamping a negative radicand to zero.

    A radicand below ``-1e-12 * ||x||_2**2 * ||B||_2`` triggers an
    :class:`~oblique_qr.errors.IndefinitenessWarning`.
    """
    b = as_operator(b)
    x = _vector(x, b.dim, "x")
    rad = float(np.vdot(x, b.apply(x)).real)
    if rad < 0.0:
        xx = float(np.vdot(x, x).real)
        if rad < -1e-12 * xx * b.norm_estimate():
            warnings.warn(f"negative B-norm radicand {rad:.3e} clamped to zero", IndefinitenessWarning, stacklevel=2)
        return 0.0
    return float(np.sqrt(rad))


def cholesky(a) -> np.ndarray:
    """Upper triangular ``R`` with positive diagonal and ``R^H R = A``.

    Raises
    ------
    NotPositiveDefinite
        With the 1-based index of the first non-positive pivot.
    """
    a = as_matrix(a, name="A")
    k = a.shape[0]
    if a.shape != (k, k):
        raise ContractViolation(f"A must be square, got shape {a.shape}")
    if k == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    scale = np.max(np.abs(a))
    if np.max(np.abs(a - a.conj().T)) > 1e-12 * scale:
        raise ContractViolation("A is not Hermitian")
    r, info = lapack.zpotrf((a + a.conj().T) / 2, lower=0, clean=1)
    if info > 0:
        raise NotPositiveDefinite(info)
    if info < 0:
        raise ContractViolation(f"zpotrf rejected argument {-info}")
    return r


def _power_gram(g: np.ndarray) -> float:
    """Largest eigenvalue of a Hermitian PSD matrix by power iteration."""
    n = g.shape[0]
    # fixed, non-symmetric start so no eigenvector is missed by construction
    x = (1.0 + np.arange(n) / n + 0.5j * np.cos(np.arange(n))).astype(np.complex128)
    x /= np.linalg.norm(x)
    lam = 0.0
    for _ in range(_POWER_MAXITER):
        y = g @ x
        lam_new = float(np.vdot(x, y).real)
        ny = np.linalg.norm(y)
        if ny == 0.0:
            return 0.0
        x = y / ny
        if abs(lam_new - lam) <= _POWER_TOL * abs(lam_new):
            return lam_new
        lam = lam_new
    return lam


def spectral_norm(m) -> float:
    """Largest singular value of ``m``; 0 for an empty matrix.

    Small or square inputs use a full SVD; tall (or wide) inputs run power
    iteration on the smaller Gram matrix ``M^H M`` (resp. ``M M^H``).
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim == 1:
        m = m[:, None]
    if m.size == 0:
        return 0.0
    rows, cols = m.shape
    if rows == cols or max(rows, cols) <= _SVD_CUTOFF:
        return float(np.linalg.svd(m, compute_uv=False)[0])
    scale = np.max(np.abs(m))
    if scale == 0.0:
        return 0.0
    ms = m / scale
    g = ms.conj().T @ ms if rows > cols else ms @ ms.conj().T
    return float(scale * np.sqrt(max(_power_gram(g), 0.0)))
