"""Gram-Schmidt orthogonalization in the B-inner product.

Four variants: classical (``cgs``) and modified (``mgs``) Gram-Schmidt,
and ``cgs2``/``mgs2`` which repeat the projection once more against all
accepted columns. A column whose squared B-norm after projection is at
most ``drop_tol`` is dropped: it contributes no column to ``Q`` and no
row to ``R``.
"""

from __future__ import annotations

import numpy as np

from .core import as_matrix, as_operator
from .errors import ContractViolation
from .factor import QRFactorization
from .reflector import ReflectorSet

__all__ = ["VARIANTS", "gram_schmidt"]

VARIANTS = ("cgs", "mgs", "cgs2", "mgs2")


def _project_classical(q, bq, x):
    c = bq.conj().T @ x
    return x - q @ c, c


def _project_modified(q, bq, x):
    c = np.zeros(q.shape[1], dtype=np.complex128)
    for j in range(q.shape[1]):
        c[j] = np.vdot(bq[:, j], x)
        x = x - q[:, j] * c[j]
    return x, c


def gram_schmidt(x, b, variant="mgs", drop_tol=0.0) -> QRFactorization:
    """B-orthonormalize the columns of ``x`` by Gram-Schmidt.

    Parameters
    ----------
    x : array_like, shape (n, k)
    b : BOperator or array_like
    variant : {"cgs", "mgs", "cgs2", "mgs2"}
    drop_tol : float
        Columns with ``q^H B q <= drop_tol`` after projection are dropped.

    Returns
    -------
    QRFactorization
        ``q`` is ``n x rank`` and ``r`` is ``rank x k``; for the two-pass
        variants ``r`` holds the sum of both passes' coefficients.
        ``deflated`` flags the dropped columns of ``x``.
    """
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    b = as_operator(b)
    x = as_matrix(x, name="X")
    n, k = x.shape
    if n != b.dim:
        raise ContractViolation(f"X has {n} rows, B has dimension {b.dim}")
    project = _project_classical if variant.startswith("cgs") else _project_modified
    passes = 2 if variant.endswith("2") else 1

    q = np.zeros((n, k), dtype=np.complex128, order="F")
    bq = np.zeros((n, k), dtype=np.complex128, order="F")
    r = np.zeros((k, k), dtype=np.complex128)
    deflated = np.zeros(k, dtype=bool)
    m = 0
    for i in range(k):
        v = x[:, i].copy()
        coef = np.zeros(m, dtype=np.complex128)
        for _ in range(passes):
            if m == 0:
                break
            v, c = project(q[:, :m], bq[:, :m], v)
            coef += c
        r[:m, i] = coef
        bv = b.apply(v)
        nrm2 = float(np.vdot(v, bv).real)
        if nrm2 <= drop_tol:
            deflated[i] = True
            continue
        nrm = np.sqrt(nrm2)
        q[:, m] = v / nrm
        bq[:, m] = bv / nrm
        r[m, i] = nrm
        m += 1
    return QRFactorization(q[:, :m].copy(), r[:m, :].copy(), ReflectorSet.empty(n), m, deflated)
