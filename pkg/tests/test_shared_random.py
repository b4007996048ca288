import numpy as np

from commsim import shared_random
from commsim.shared_random import derive_stream, gaussian_matrix, iter_gaussian_rows, uniform


def test_coordinates_are_independent_of_selection():
    full = gaussian_matrix(5, 1, [0, 1, 2, 3], 100)
    part = gaussian_matrix(5, 1, [3, 1], 100)
    np.testing.assert_array_equal(part, full[:, [3, 1]])


def test_chunking_does_not_change_values():
    whole = gaussian_matrix(9, 0, [2, 7], 300)
    pieces = np.vstack([b for _, b in iter_gaussian_rows(9, 0, [2, 7], 300, chunk=64)])
    np.testing.assert_array_equal(whole, pieces)


def test_streams_and_seeds_differ():
    a = gaussian_matrix(1, 0, [0], 50)
    assert not np.array_equal(a, gaussian_matrix(1, 1, [0], 50))
    assert not np.array_equal(a, gaussian_matrix(2, 0, [0], 50))


def test_derive_stream():
    s = derive_stream(1, 2, 3)
    assert s == derive_stream(1, 2, 3)
    assert s != derive_stream(1, 2, 4)
    assert 0 <= s < 2**63


def test_uniform_range_and_determinism():
    vals = [uniform(3, k) for k in range(200)]
    assert all(0 <= v < 1 for v in vals)
    assert vals == [uniform(3, k) for k in range(200)]
    assert 0.35 < np.mean(vals) < 0.65


def test_gaussian_moments():
    g = gaussian_matrix(123, 0, [0], 20000)[:, 0]
    assert abs(g.mean()) < 0.05
    assert abs(g.var() - 1) < 0.05
    assert shared_random.CHUNK_ROWS > 0
