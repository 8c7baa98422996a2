"""Householder QR factorization in a B-weighted inner product.

Computes ``X = Q R`` with ``Q^H B Q = I`` for Hermitian positive definite
``B``, alongside Gram-Schmidt baselines and a benchmark harness.
"""

from .baseline import VARIANTS, gram_schmidt
from .core import BOperator, apply_b, as_operator, b_inner, b_norm, cholesky, spectral_norm
from .errors import (
    ContractViolation,
    DegenerateReflector,
    IndefinitenessWarning,
    InitialBasisFailure,
    MatrixMarketError,
    NonFiniteInput,
    NotPositiveDefinite,
    OrthogonalityWarning,
    ZeroInput,
)
from .factor import (
    LeftLookingQR,
    OrthOptions,
    QRFactorization,
    assemble_q,
    householder_qr_block,
    householder_qr_left,
    householder_qr_right,
    initial_basis,
)
from .mmio import read_matrix, read_operator, write_matrix
from .probe import (
    ProblemSpec,
    build_rank_deficient,
    condition_number,
    gen_conditioned,
    gen_spd,
    loss_of_orthogonality,
    relative_residual,
)
from .reflector import ReflectorSet, apply_reflector, make_reflector, wy_apply, wy_build

__version__ = "0.1.0"
