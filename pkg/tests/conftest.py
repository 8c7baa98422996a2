import numpy as np
import pytest

from oblique_qr import BOperator


def random_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_pd(rng, n, log_kappa=2.0):
    """Hermitian PD matrix with eigenvalues spread over ``10**-log_kappa .. 1``."""
    q, _ = np.linalg.qr(random_complex(rng, n, n))
    d = np.logspace(0, -log_kappa, n)
    a = (q * d) @ q.conj().T
    return (a + a.conj().T) / 2


def random_b_orthonormal(rng, b, n, k):
    """k B-orthonormal columns: two passes of Cholesky-QR (oracle path).

    The second pass brings the B-orthogonality error down to a few ulps.
    """
    x = random_complex(rng, n, k)
    for _ in range(2):
        l = np.linalg.cholesky(x.conj().T @ b @ x)
        x = x @ np.linalg.inv(l.conj().T)
    return x


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def pd_operator(rng):
    return BOperator.explicit(random_pd(rng, 12, 2.0))
