import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_complex, random_pd
from oblique_qr import (
    BOperator,
    ContractViolation,
    IndefinitenessWarning,
    NonFiniteInput,
    NotPositiveDefinite,
    apply_b,
    b_inner,
    b_norm,
    cholesky,
    spectral_norm,
)
from oblique_qr.core import as_matrix

seeds = st.integers(min_value=0, max_value=2**32 - 1)


# -- apply_b -----------------------------------------------------------------


def test_apply_identity_returns_input(rng):
    m = random_complex(rng, 3, 2)
    np.testing.assert_array_equal(apply_b(BOperator.identity(3), m), m)


def test_apply_diagonal_scaling():
    out = apply_b(np.diag([2.0, 3.0]), np.array([[1.0], [1.0]]))
    np.testing.assert_array_equal(out, [[2], [3]])


def test_apply_explicit_hand_value():
    out = apply_b(np.array([[2.0, 1.0], [1.0, 2.0]]), np.array([[1.0], [0.0]]))
    np.testing.assert_array_equal(out, [[2], [1]])


def test_apply_dimension_mismatch():
    with pytest.raises(ContractViolation):
        apply_b(BOperator.identity(3), np.ones((2, 1)))


def test_apply_is_deterministic(rng):
    b = BOperator.explicit(random_pd(rng, 20))
    m = random_complex(rng, 20, 4)
    assert np.array_equal(apply_b(b, m), apply_b(b, m))


def test_callback_matches_explicit_bitwise(rng):
    a = random_pd(rng, 15)
    explicit = BOperator.explicit(a)
    mat = explicit.matrix
    callback = BOperator.from_callback(lambda x: mat @ x, 15, vectorized=True)
    m = np.asfortranarray(random_complex(rng, 15, 3))
    assert np.array_equal(apply_b(explicit, m), apply_b(callback, m))


def test_columnwise_callback_agrees(rng):
    a = random_pd(rng, 10)
    calls = []

    def fn(x):
        calls.append(x.shape)
        return a @ x

    b = BOperator.from_callback(fn, 10)
    m = random_complex(rng, 10, 3)
    np.testing.assert_allclose(apply_b(b, m), a @ m, atol=1e-14)
    assert calls == [(10,)] * 3


def test_explicit_is_symmetrized_and_read_only():
    b = BOperator.explicit(np.array([[2.0, 1.0], [0.0, 2.0]]))
    np.testing.assert_array_equal(b.matrix, [[2, 0.5], [0.5, 2]])
    assert not b.matrix.flags.writeable


def test_nonfinite_rejected():
    with pytest.raises(NonFiniteInput):
        as_matrix(np.array([1.0, np.nan]))
    with pytest.raises(NonFiniteInput):
        BOperator.explicit(np.array([[np.inf]]))


def test_leading_block_callback(rng):
    a = random_pd(rng, 8)
    b = BOperator.from_callback(lambda x: a @ x, 8)
    np.testing.assert_allclose(b.leading_block(3), a[:3, :3], atol=1e-15)


# -- b_inner / b_norm -------------------------------------------------------


def test_b_inner_examples():
    e1, e2 = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    assert b_inner(e1, e1, np.eye(2)) == 1
    assert b_inner(e1, e2, np.diag([2.0, 3.0])) == 0
    # y^H B x with x=(1,1), y=(1,0): first row of B summed
    assert b_inner(np.array([1.0, 1.0]), e1, np.array([[2.0, 1.0], [1.0, 2.0]])) == 3


def test_b_inner_dimension_mismatch():
    with pytest.raises(ContractViolation):
        b_inner(np.ones(3), np.ones(2), np.eye(2))


def test_b_norm_examples():
    assert b_norm(np.array([1.0]), np.diag([4.0])) == 2
    assert b_norm(np.zeros(3), np.eye(3)) == 0
    assert b_norm(np.array([1.0, 1.0]), np.array([[2.0, 1.0], [1.0, 2.0]])) == pytest.approx(np.sqrt(6), rel=1e-15)


def test_b_norm_clamps_and_warns_on_indefinite():
    b = np.diag([1.0, -1.0])
    with pytest.warns(IndefinitenessWarning):
        assert b_norm(np.array([0.0, 1.0]), b) == 0.0


def test_b_norm_tiny_negative_is_silent():
    b = np.diag([1.0, -1e-14])
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert b_norm(np.array([0.0, 1.0]), b) == 0.0


@settings(max_examples=50, deadline=None)
@given(seed=seeds, n=st.integers(1, 12))
def test_b_inner_conjugate_symmetric(seed, n):
    rng = np.random.default_rng(seed)
    a = random_pd(rng, n)
    x, y = random_complex(rng, n), random_complex(rng, n)
    lhs = b_inner(x, y, a)
    rhs = np.conj(b_inner(y, x, a))
    tol = 1e-14 * np.linalg.norm(x) * np.linalg.norm(y) * np.linalg.norm(a, 2)
    assert abs(lhs - rhs) <= tol


@settings(max_examples=50, deadline=None)
@given(seed=seeds, n=st.integers(1, 12))
def test_b_norm_squared_is_inner(seed, n):
    rng = np.random.default_rng(seed)
    a = random_pd(rng, n)
    x = random_complex(rng, n)
    ip = b_inner(x, x, a).real
    assert b_norm(x, a) ** 2 == pytest.approx(ip, rel=1e-14)


# -- cholesky ----------------------------------------------------------------


def test_cholesky_identity():
    np.testing.assert_array_equal(cholesky(np.eye(4)), np.eye(4))


def test_cholesky_hand_value():
    r = cholesky(np.array([[4.0, 2.0], [2.0, 5.0]]))
    np.testing.assert_allclose(r, [[2, 1], [0, 2]], atol=1e-15)


def test_cholesky_indefinite_reports_pivot():
    with pytest.raises(NotPositiveDefinite) as exc:
        cholesky(np.array([[1.0, 2.0], [2.0, 1.0]]))
    assert exc.value.pivot == 2


def test_cholesky_rejects_non_hermitian():
    with pytest.raises(ContractViolation):
        cholesky(np.array([[1.0, 2.0], [0.0, 1.0]]))


@settings(max_examples=40, deadline=None)
@given(seed=seeds, k=st.integers(1, 50))
def test_cholesky_reconstructs(seed, k):
    rng = np.random.default_rng(seed)
    a = random_pd(rng, k, 4.0)
    r = cholesky(a)
    assert np.allclose(np.tril(r, -1), 0)
    d = np.diag(r)
    assert np.all(d.real > 0) and np.all(d.imag == 0)
    err = np.linalg.norm(r.conj().T @ r - a) / np.linalg.norm(a)
    assert err <= 1e-13 * k


# -- spectral_norm -----------------------------------------------------------


def test_spectral_norm_examples():
    assert spectral_norm(np.diag([3.0, 1.0])) == pytest.approx(3, rel=1e-15)
    assert spectral_norm(np.zeros((3, 2))) == 0
    assert spectral_norm(np.array([[0.0, 2.0], [0.0, 0.0]])) == pytest.approx(2, rel=1e-15)
    assert spectral_norm(np.zeros((0, 3))) == 0


@settings(max_examples=40, deadline=None)
@given(seed=seeds, r=st.integers(1, 20), c=st.integers(1, 20))
def test_spectral_norm_small_matches_svd(seed, r, c):
    m = random_complex(np.random.default_rng(seed), r, c)
    ref = np.linalg.svd(m, compute_uv=False)[0]
    assert spectral_norm(m) == pytest.approx(ref, rel=1e-10)


@pytest.mark.parametrize("shape", [(300, 7), (7, 300), (500, 60)])
def test_spectral_norm_power_iteration(rng, shape):
    # tall/wide inputs take the power-iteration path
    u, _ = np.linalg.qr(random_complex(rng, max(shape), min(shape)))
    s = np.linspace(5.0, 1.0, min(shape))
    m = (u * s) @ np.linalg.qr(random_complex(rng, min(shape), min(shape)))[0]
    if shape[0] < shape[1]:
        m = m.conj().T
    assert spectral_norm(m) == pytest.approx(5.0, rel=1e-10)
