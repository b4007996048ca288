import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from commsim.errors import InvalidMatrix, NotNormalized, ShapeMismatch
from commsim.matcore import (SchmidtState, matrix_from_json, matrix_to_json, nuclear_norm,
                             partial_trace, schmidt_decompose, spectral_norm, tensor, trace_norm)

from conftest import random_matrix, random_unit


def test_spectral_norm_examples():
    assert spectral_norm(np.eye(4)) == pytest.approx(1.0)
    assert spectral_norm(np.zeros((3, 3))) == 0.0
    assert spectral_norm(np.diag([3.0, 1.0, -2.0])) == pytest.approx(3.0)


def test_spectral_norm_rejects_nonfinite():
    with pytest.raises(InvalidMatrix):
        spectral_norm(np.array([[np.nan, 0], [0, 1]]))
    with pytest.raises(InvalidMatrix):
        spectral_norm(np.array([[np.inf]]))


def test_trace_norm_examples():
    assert trace_norm(np.eye(5)) == pytest.approx(5.0)
    v = random_unit(np.random.default_rng(1), 4)
    w = random_unit(np.random.default_rng(2), 4)
    assert trace_norm(np.outer(v, w.conj())) == pytest.approx(1.0)


def test_trace_norm_of_odd_inner_product_pattern():
    # sum over x.y = 1 of |x><y| for 2-bit strings; singular values by hand:
    # rows 01, 10, 11 -> [[0,1,0,1],[0,0,1,1],[0,1,1,0]] after dropping the zero row,
    # a 3x3 block [[1,0,1],[0,1,1],[1,1,0]] with eigenvalues 2, 1, -1 (symmetric).
    m = np.array([[0, 0, 0, 0], [0, 1, 0, 1], [0, 0, 1, 1], [0, 1, 1, 0]], dtype=float)
    assert trace_norm(m) == pytest.approx(4.0)


def test_trace_norm_needs_square():
    with pytest.raises(ShapeMismatch):
        trace_norm(np.ones((2, 3)))
    assert nuclear_norm(np.ones((2, 3))) == pytest.approx(np.sqrt(6))


def test_norm_ordering(rng):
    for _ in range(20):
        m = random_matrix(rng, 5)
        s, t = spectral_norm(m), trace_norm(m)
        assert s <= t + 1e-12
        assert t <= 5 * s + 1e-12


def test_schmidt_product_state():
    st_ = schmidt_decompose(np.kron([1, 0], [0, 1]), 2, 2)
    assert st_.rank == 1
    np.testing.assert_allclose(st_.coefficients, [1.0])


def test_schmidt_singlet():
    v = np.array([0, 1, -1, 0]) / np.sqrt(2)
    st_ = schmidt_decompose(v, 2, 2)
    np.testing.assert_allclose(st_.coefficients, [0.5, 0.5], atol=1e-12)
    np.testing.assert_allclose(st_.vector(), v, atol=1e-12)


def test_schmidt_phase_convention(rng):
    st_ = schmidt_decompose(random_unit(rng, 9), 3, 3)
    for col in st_.basis_a.T:
        first = col[np.flatnonzero(np.abs(col) > 1e-14)[0]]
        assert abs(first.imag) < 1e-12 and first.real > 0


def test_schmidt_reconstruction_random(rng):
    for _ in range(100):
        da, db = rng.integers(1, 5, size=2)
        v = random_unit(rng, da * db)
        st_ = schmidt_decompose(v, da, db)
        assert np.linalg.norm(st_.vector() - v) < 1e-9
        assert np.all(np.diff(st_.coefficients) <= 0)


def test_schmidt_errors():
    with pytest.raises(NotNormalized):
        schmidt_decompose(np.array([1.0, 1.0, 0, 0]), 2, 2)
    with pytest.raises(ShapeMismatch):
        schmidt_decompose(np.array([1.0, 0, 0]), 2, 2)


def test_schmidt_state_validation():
    with pytest.raises(NotNormalized):
        SchmidtState(np.array([0.5, 0.4]), np.eye(2), np.eye(2))
    with pytest.raises(InvalidMatrix):
        SchmidtState(np.array([0.4, 0.6]), np.eye(2), np.eye(2))
    with pytest.raises(InvalidMatrix):
        SchmidtState(np.array([0.5, 0.5]), np.ones((2, 2)), np.eye(2))


def test_tensor_and_partial_trace():
    np.testing.assert_array_equal(tensor(np.eye(2), np.eye(2)), np.eye(4))
    assert np.array_equal(tensor([np.eye(2), np.eye(3)]), np.eye(6))
    v = np.array([0, 1, -1, 0]) / np.sqrt(2)
    rho = np.outer(v, v.conj())
    np.testing.assert_allclose(partial_trace(rho, [2, 2], [0]), np.eye(2) / 2, atol=1e-12)


def test_partial_trace_preserves_trace(rng):
    for _ in range(20):
        dims = list(rng.integers(1, 4, size=3))
        n = int(np.prod(dims))
        m = random_matrix(rng, n)
        for keep in ([0], [1, 2], [0, 2], []):
            assert np.trace(partial_trace(m, dims, keep)) == pytest.approx(np.trace(m))


def test_partial_trace_of_product(rng):
    a, b = random_matrix(rng, 3), random_matrix(rng, 2)
    np.testing.assert_allclose(partial_trace(tensor(a, b), [3, 2], [0]), np.trace(b) * a, atol=1e-10)
    with pytest.raises(ShapeMismatch):
        partial_trace(np.eye(5), [2, 2], [0])


def test_tensor_associative(rng):
    # exact on Gaussian integers, where every product is representable
    a, b, c = (np.round(3 * random_matrix(rng, r, k)) for r, k in ((2, 2), (3, 2), (2, 1)))
    assert np.array_equal(tensor(tensor(a, b), c), tensor(a, tensor(b, c)))
    a, b, c = random_matrix(rng, 2), random_matrix(rng, 3, 2), random_matrix(rng, 2, 1)
    np.testing.assert_allclose(tensor(tensor(a, b), c), tensor(a, tensor(b, c)), rtol=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_matrix_json_roundtrip(rows, cols, seed):
    m = random_matrix(np.random.default_rng(seed), rows, cols)
    obj = matrix_to_json(m)
    assert obj["rows"] == rows and obj["cols"] == cols and len(obj["data"]) == rows * cols
    assert np.array_equal(matrix_from_json(obj), m)


def test_matrix_json_rejects_bad_length():
    with pytest.raises(InvalidMatrix):
        matrix_from_json({"rows": 2, "cols": 2, "data": [[1, 0]]})
