"""Householder reflections ``H = I - 2 w w^H B`` in the B-inner product.

Every kernel here takes ``B w`` alongside ``w`` when it is available so
that a reflection costs O(n m) on an n x m block instead of a product
with B. The public functions compute ``B w`` themselves.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import as_matrix, as_operator
from .errors import ContractViolation, DegenerateReflector

__all__ = ["ReflectorSet", "make_reflector", "apply_reflector", "wy_build", "wy_apply", "phase_sign"]

# Householder vectors whose B-norm falls below this before normalization are rejected.
DEGENERATE_NORM = 1e-14


def phase_sign(z: complex) -> complex:
    """``z / |z|`` with ``sign(0) = 1``."""
    a = abs(z)
    return complex(z / a) if a != 0 else 1.0 + 0.0j


@dataclass
class ReflectorSet:
    """Householder vectors ``W``, their phases and an optional WY factor.

    A zero column of ``vectors`` stands for the identity (deflated step);
    its phase is 1.
    """

    n: int
    vectors: np.ndarray
    phases: np.ndarray
    wy_t: Optional[np.ndarray] = None
    _bw: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    @classmethod
    def empty(cls, n) -> "ReflectorSet":
        return cls(n, np.zeros((n, 0), dtype=np.complex128), np.zeros(0, dtype=np.complex128))

    def __len__(self):
        return self.vectors.shape[1]

    @property
    def deflated(self) -> np.ndarray:
        return ~np.any(self.vectors != 0, axis=0)

    def b_vectors(self, b) -> np.ndarray:
        """``B @ vectors``, cached after the first call."""
        if self._bw is None or self._bw.shape != self.vectors.shape:
            self._bw = as_operator(b).apply(self.vectors)
        return self._bw


def _householder_vector(v, bv, u, bu, prior=None, bprior=None):
    """Householder vector mapping unit ``v`` onto ``u * alpha``.

    ``alpha = -sign(u^H B v)`` keeps ``v - u alpha`` as long as possible.
    If ``prior`` is given the vector is re-projected once against it
    (classical projection, B-inner product) before normalization.
    Returns ``(w, B w, alpha)``.
    """
    s = np.vdot(bu, v)
    alpha = -phase_sign(s)
    w = v - u * alpha
    bw = bv - bu * alpha
    if prior is not None and prior.shape[1] > 0:
        c = bprior.conj().T @ w
        w = w - prior @ c
        bw = bw - bprior @ c
    nrm2 = float(np.vdot(w, bw).real)
    nrm = np.sqrt(nrm2) if nrm2 > 0 else 0.0
    if nrm < DEGENERATE_NORM:
        raise DegenerateReflector(f"Householder vector has B-norm {nrm:.3e}")
    return w / nrm, bw / nrm, alpha


def make_reflector(v, u, b, prior_basis=None, reorth=True):
    """Reflection ``H = I - 2 w w^H B`` with ``H v = u alpha``.

    Parameters
    ----------
    v, u : array_like
        Vectors of unit B-norm.
    b : BOperator or array_like
    prior_basis : array_like, optional
        B-orthonormal columns that ``u`` is orthogonal to. With ``reorth``
        set, ``w`` is projected against them once more.

    Returns
    -------
    w : ndarray
        Householder vector with ``||w||_B = 1``.
    alpha : complex
        Unit phase ``-sign(u^H B v)``; also ``H u = v * conj(alpha)``.
    """
    b = as_operator(b)
    v = as_matrix(v, name="v")[:, 0]
    u = as_matrix(u, name="u")[:, 0]
    n = b.dim
    if v.shape[0] != n or u.shape[0] != n:
        raise ContractViolation("v and u must have length B.dim")
    bv = b.apply(v)
    bu = b.apply(u)
    for name, x, bx in (("v", v, bv), ("u", u, bu)):
        if abs(np.sqrt(abs(np.vdot(x, bx).real)) - 1.0) > 1e-10:
            raise ContractViolation(f"{name} must have unit B-norm")
    prior = bprior = None
    if reorth and prior_basis is not None:
        prior = as_matrix(prior_basis, name="prior_basis")
        if prior.shape[0] != n:
            raise ContractViolation("prior_basis must have B.dim rows")
        bprior = b.apply(prior)
    w, _, alpha = _householder_vector(v, bv, u, bu, prior, bprior)
    return w, alpha


def _reflect(w, bw, m):
    """``(I - 2 w w^H B) m`` given ``B w``."""
    if m.ndim == 1:
        return m - 2.0 * w * np.vdot(bw, m)
    return m - 2.0 * np.outer(w, bw.conj() @ m)


def apply_reflector(w, b, m) -> np.ndarray:
    """Apply ``I - 2 w w^H B`` to a vector or matrix. ``w = 0`` is the identity."""
    b = as_operator(b)
    w = np.asarray(w, dtype=np.complex128).reshape(-1)
    m = np.asarray(m, dtype=np.complex128)
    if w.shape[0] != b.dim or m.shape[0] != b.dim:
        raise ContractViolation("w and M must have B.dim rows")
    if not np.any(w):
        return m.copy()
    return _reflect(w, b.apply(w), m)


def _wy_extend(t, gram_col):
    """Append one reflector to a WY factor.

    ``gram_col`` holds ``W_{i-1}^H B w_i``. The new column is
    ``-2 T_{i-1} gram_col`` so that the product identity
    ``H_1 ... H_i = I - 2 W_i T_i W_i^H B`` holds.
    """
    i = t.shape[0]
    out = np.zeros((i + 1, i + 1), dtype=np.complex128)
    out[:i, :i] = t
    out[:i, i] = -2.0 * (t @ gram_col)
    out[i, i] = 1.0
    return out


def _wy_from_gram(gram):
    k = gram.shape[0]
    t = np.zeros((k, k), dtype=np.complex128)
    for i in range(k):
        t[i, i] = 1.0
        if i:
            t[:i, i] = -2.0 * (t[:i, :i] @ gram[:i, i])
    return t


def wy_build(w, b) -> np.ndarray:
    """Unit upper triangular ``T`` with ``H_1 ... H_k = I - 2 W T W^H B``."""
    b = as_operator(b)
    w = as_matrix(w, name="W")
    if w.shape[0] != b.dim:
        raise ContractViolation("W must have B.dim rows")
    bw = b.apply(w)
    return _wy_from_gram(bw.conj().T @ w)


def _wy_apply(w, bw, t, m, adjoint):
    if w.shape[1] == 0:
        return m.copy()
    tt = t.conj().T if adjoint else t
    return m - 2.0 * (w @ (tt @ (bw.conj().T @ m)))


def wy_apply(w, t, b, m, direction="forward") -> np.ndarray:
    """Apply a block of reflections through its WY factor.

    ``direction="forward"`` applies ``H_1 ... H_k = I - 2 W T W^H B``;
    ``"adjoint"`` applies its inverse ``H_k ... H_1 = I - 2 W T^H W^H B``.
    """
    if direction not in ("forward", "adjoint"):
        raise ValueError(f"direction must be 'forward' or 'adjoint', got {direction!r}")
    b = as_operator(b)
    w = as_matrix(w, name="W")
    t = np.asarray(t, dtype=np.complex128)
    m = np.asarray(m, dtype=np.complex128)
    k = w.shape[1]
    if w.shape[0] != b.dim or m.shape[0] != b.dim:
        raise ContractViolation("W and M must have B.dim rows")
    if t.shape != (k, k):
        raise ContractViolation(f"T must be {k}x{k}, got {t.shape}")
    if k == 0:
        return m.copy()
    return _wy_apply(w, b.apply(w), t, m, direction == "adjoint")
