"""Householder QR factorization ``X = Q R`` with ``Q^H B Q = I``.

The reflections map a given B-orthonormal basis ``U`` onto the columns of
``Q``. Three drivers are provided: right-looking, left-looking (also as
an incremental handle, :class:`LeftLookingQR`) and a blocked variant
that factors panels left-looking and updates the trailing columns with
the panel's WY representation.

The diagonal of ``R`` is real and nonnegative: the phase of each
reflection is moved into the matching column of ``Q``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import solve_triangular

from .core import BOperator, as_matrix, as_operator, cholesky, spectral_norm
from .errors import ContractViolation, InitialBasisFailure, NotPositiveDefinite, OrthogonalityWarning
from .reflector import ReflectorSet, _householder_vector, _reflect, _wy_apply, _wy_extend

__all__ = [
    "OrthOptions",
    "QRFactorization",
    "LeftLookingQR",
    "initial_basis",
    "householder_qr_right",
    "householder_qr_left",
    "householder_qr_block",
    "assemble_q",
]

# ||U^H B U - I||_2 above this triggers an OrthogonalityWarning.
BASIS_WARN_TOL = 1e-8


@dataclass(frozen=True)
class OrthOptions:
    """Knobs shared by the Householder drivers.

    ``deflation_tol = 0`` deflates only on an exactly zero ``r_ii``; a
    positive value ``tau`` deflates when ``r_ii <= tau * ||x_i||_B`` with
    ``x_i`` the original column. ``panel_width`` is used by the blocked
    driver only and is capped at ``k``.
    """

    reorth: bool = True
    deflation_tol: float = 0.0
    panel_width: int = 32

    def __post_init__(self):
        if not self.deflation_tol >= 0:
            raise ContractViolation("deflation_tol must be >= 0")
        if self.panel_width < 1:
            raise ContractViolation("panel_width must be >= 1")


@dataclass
class QRFactorization:
    q: np.ndarray
    r: np.ndarray
    reflectors: ReflectorSet
    numerical_rank: int
    deflated: np.ndarray


def initial_basis(b, k) -> np.ndarray:
    """B-orthonormal ``U = [R~^{-1}; 0]`` from the leading ``k x k`` block of B.

    ``R~`` is the Cholesky factor of that block, so ``U^H B U = I_k`` up to
    rounding amplified by its condition number.

    Raises
    ------
    InitialBasisFailure
        If the leading block is not numerically positive definite.
    """
    b = as_operator(b)
    n = b.dim
    if not 1 <= k <= n:
        raise ContractViolation(f"need 1 <= k <= n, got k={k}, n={n}")
    block = b.leading_block(k)
    block = (block + block.conj().T) / 2
    try:
        rt = cholesky(block)
    except NotPositiveDefinite as exc:
        raise InitialBasisFailure(exc.pivot) from exc
    u = np.zeros((n, k), dtype=np.complex128)
    u[:k, :] = solve_triangular(rt, np.eye(k, dtype=np.complex128), lower=False)
    return u


def _check_inputs(x, b, u):
    b = as_operator(b)
    x = as_matrix(x, name="X")
    u = as_matrix(u, name="U")
    n, k = x.shape
    if n != b.dim or u.shape != (n, k):
        raise ContractViolation(f"X is {x.shape}, U is {u.shape}, B has dimension {b.dim}")
    if k > n:
        raise ContractViolation(f"need k <= n, got {k} > {n}")
    return x, b, u


def _check_basis(u, bu):
    if u.shape[1] == 0:
        return
    eps_o = spectral_norm(u.conj().T @ bu - np.eye(u.shape[1]))
    if eps_o > BASIS_WARN_TOL:
        warnings.warn(f"||U^H B U - I||_2 = {eps_o:.2e}; orthogonality of Q is limited by U", OrthogonalityWarning, stacklevel=3)


class _Engine:
    """Per-factorization state: reflectors, the unscaled R, deflation flags."""

    def __init__(self, b: BOperator, u, opts: OrthOptions, check_basis=True):
        self.b = b
        self.u = u
        self.bu = b.apply(u)
        self.opts = opts
        n, k = u.shape
        self.n, self.k = n, k
        self.w = np.zeros((n, k), dtype=np.complex128, order="F")
        self.bw = np.zeros((n, k), dtype=np.complex128, order="F")
        self.alpha = np.ones(k, dtype=np.complex128)
        self.r = np.zeros((k, k), dtype=np.complex128)
        self.deflated = np.zeros(k, dtype=bool)
        if check_basis:
            _check_basis(u, self.bu)

    def step(self, i, x, prior, orig_norm=0.0):
        """Reduce the (already transformed and projected) column ``x`` at step ``i``.

        ``prior`` selects the earlier basis vectors used for the optional
        re-projection of the Householder vector.
        """
        bx = self.b.apply(x)
        rad = float(np.vdot(x, bx).real)
        rii = float(np.sqrt(rad)) if rad > 0 else 0.0
        tau = self.opts.deflation_tol
        if rii == 0.0 or (tau > 0 and rii <= tau * orig_norm):
            self.deflated[i] = True
            return
        self.r[i, i] = rii
        ui, bui = self.u[:, i], self.bu[:, i]
        p = bp = None
        if self.opts.reorth:
            p, bp = self.u[:, prior], self.bu[:, prior]
        w, bw, alpha = _householder_vector(x / rii, bx / rii, ui, bui, p, bp)
        self.w[:, i] = w
        self.bw[:, i] = bw
        self.alpha[i] = alpha

    def finish(self, m, wy_t=None) -> QRFactorization:
        w, bw, alpha = self.w[:, :m], self.bw[:, :m], self.alpha[:m]
        q = _assemble(w, bw, alpha, self.u[:, :m])
        r = np.triu(self.r[:m, :m])
        diag = np.diag(r).real.copy()
        r = alpha.conj()[:, None] * r
        r[np.diag_indices(m)] = diag
        defl = self.deflated[:m].copy()
        refl = ReflectorSet(self.n, w.copy(), alpha.copy(), wy_t, _bw=bw.copy())
        return QRFactorization(q, r, refl, int(m - defl.sum()), defl)


def _assemble(w, bw, alpha, u):
    """``H_1 ... H_k U`` by a reverse sweep, then column phases.

    ``H_j`` touches columns ``j..k`` only, since it fixes every earlier
    basis vector that took part in the factorization. Deflated columns
    receive every later reflection.
    """
    q = np.array(u, dtype=np.complex128, order="F")
    k = q.shape[1]
    defl = ~np.any(w != 0, axis=0)
    for j in range(k - 1, -1, -1):
        if defl[j]:
            continue
        if defl[:j].any():
            cols = np.concatenate([np.flatnonzero(defl[:j]), np.arange(j, k)])
            q[:, cols] = _reflect(w[:, j], bw[:, j], q[:, cols])
        else:
            q[:, j:] = _reflect(w[:, j], bw[:, j], q[:, j:])
    return q * alpha[None, :]


def assemble_q(reflectors: ReflectorSet, u, b) -> np.ndarray:
    """Form ``Q = H_1 ... H_k U`` with the reflectors' phases applied per column."""
    b = as_operator(b)
    u = as_matrix(u, name="U")
    k = len(reflectors)
    if u.shape != (b.dim, k) or reflectors.n != b.dim:
        raise ContractViolation(f"U must be {b.dim}x{k}, got {u.shape}")
    return _assemble(reflectors.vectors, reflectors.b_vectors(b), reflectors.phases, u)


def _column_norms(b, x):
    bx = b.apply(x)
    return np.sqrt(np.maximum(np.einsum("ij,ij->j", x.conj(), bx).real, 0.0))


def householder_qr_right(x, b, u, opts: Optional[OrthOptions] = None) -> QRFactorization:
    """Right-looking Householder orthogonalization.

    After step ``i`` the reflection and the projection onto ``u_i`` are
    applied to all trailing columns at once. A deflated step is skipped
    entirely, leaving row ``i`` of ``R`` zero.
    """
    x, b, u = _check_inputs(x, b, u)
    opts = opts or OrthOptions()
    eng = _Engine(b, u, opts)
    k = x.shape[1]
    norms = _column_norms(b, x) if opts.deflation_tol > 0 else np.zeros(k)
    x = np.array(x, order="F")
    for i in range(k):
        prior = np.flatnonzero(~eng.deflated[:i])
        eng.step(i, x[:, i], prior, norms[i])
        if eng.deflated[i] or i == k - 1:
            continue
        trail = _reflect(eng.w[:, i], eng.bw[:, i], x[:, i + 1 :])
        rrow = eng.bu[:, i].conj() @ trail
        trail -= np.outer(eng.u[:, i], rrow)
        x[:, i + 1 :] = trail
        eng.r[i, i + 1 :] = rrow
    return eng.finish(k)


def _left_step(eng: _Engine, i, x, start, t, orig_norm):
    """One left-looking step inside a panel beginning at column ``start``.

    ``t`` is the WY factor of the panel's reflectors ``start..i-1``;
    returns it extended by reflector ``i``.
    """
    if i > start:
        x = _wy_apply(eng.w[:, start:i], eng.bw[:, start:i], t, x, adjoint=True)
        rcol = eng.bu[:, start:i].conj().T @ x
        x = x - eng.u[:, start:i] @ rcol
        eng.r[start:i, i] = rcol
    eng.step(i, x, np.arange(i), orig_norm)
    return _wy_extend(t, eng.bw[:, start:i].conj().T @ eng.w[:, i])


class LeftLookingQR:
    """Incremental left-looking factorization; columns arrive one at a time.

    Examples
    --------
    >>> import numpy as np
    >>> from oblique_qr import BOperator, initial_basis
    >>> b = BOperator.identity(4)
    >>> ll = LeftLookingQR(b, initial_basis(b, 2))
    >>> ll.push_column(np.array([1.0, 1.0, 0.0, 0.0]))
    >>> ll.push_column(np.array([0.0, 1.0, 1.0, 0.0]))
    >>> f = ll.result()
    >>> bool(np.allclose(f.q @ f.r, [[1, 0], [1, 1], [0, 1], [0, 0]]))
    True
    """

    def __init__(self, b, u, opts: Optional[OrthOptions] = None):
        b = as_operator(b)
        u = as_matrix(u, name="U")
        if u.shape[0] != b.dim:
            raise ContractViolation(f"U has {u.shape[0]} rows, B has dimension {b.dim}")
        self._eng = _Engine(b, u, opts or OrthOptions())
        self._t = np.zeros((0, 0), dtype=np.complex128)
        self._count = 0

    def __len__(self):
        return self._count

    def push_column(self, x, orig_norm=None):
        eng = self._eng
        i = self._count
        if i >= eng.k:
            raise ContractViolation(f"basis U has only {eng.k} columns")
        x = as_matrix(x, name="x")
        if x.shape != (eng.n, 1):
            raise ContractViolation(f"column must have length {eng.n}")
        x = x[:, 0].copy()
        if orig_norm is None:
            orig_norm = _column_norms(eng.b, x[:, None])[0] if eng.opts.deflation_tol > 0 else 0.0
        self._t = _left_step(eng, i, x, 0, self._t, orig_norm)
        self._count += 1

    def result(self) -> QRFactorization:
        """Factorization of the columns pushed so far (basis ``U[:, :m]``)."""
        return self._eng.finish(self._count, wy_t=self._t.copy())


def householder_qr_left(x, b, u, opts: Optional[OrthOptions] = None) -> QRFactorization:
    """Left-looking Householder orthogonalization.

    Column ``i`` first receives ``H_{i-1} ... H_1`` (through the WY
    factor), is projected against ``u_1 .. u_{i-1}`` in the B-inner
    product, and then defines reflector ``i``.
    """
    x, b, u = _check_inputs(x, b, u)
    opts = opts or OrthOptions()
    ll = LeftLookingQR(b, u, opts)
    norms = _column_norms(b, x) if opts.deflation_tol > 0 else np.zeros(x.shape[1])
    for i in range(x.shape[1]):
        ll.push_column(x[:, i], norms[i])
    return ll.result()


def householder_qr_block(x, b, u, opts: Optional[OrthOptions] = None) -> QRFactorization:
    """Blocked Householder orthogonalization.

    Panels of ``opts.panel_width`` columns are factored left-looking; the
    trailing columns then get the panel's reflections in one WY
    application and one block projection onto the panel's basis vectors.
    """
    x, b, u = _check_inputs(x, b, u)
    opts = opts or OrthOptions()
    eng = _Engine(b, u, opts)
    k = x.shape[1]
    width = min(opts.panel_width, max(k, 1))
    norms = _column_norms(b, x) if opts.deflation_tol > 0 else np.zeros(k)
    x = np.array(x, order="F")
    for start in range(0, k, width):
        stop = min(start + width, k)
        t = np.zeros((0, 0), dtype=np.complex128)
        for i in range(start, stop):
            t = _left_step(eng, i, x[:, i], start, t, norms[i])
        if stop < k:
            trail = _wy_apply(eng.w[:, start:stop], eng.bw[:, start:stop], t, x[:, stop:], adjoint=True)
            rblk = eng.bu[:, start:stop].conj().T @ trail
            trail -= eng.u[:, start:stop] @ rblk
            x[:, stop:] = trail
            eng.r[start:stop, stop:] = rblk
    return eng.finish(k)
