"""Dense complex linear-algebra primitives.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``. Vectors
are accepted either as 1-D arrays or as single columns.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .errors import InvalidMatrix, NotNormalized, ShapeMismatch

# Singular values below this fraction of the largest are treated as zero.
RANK_TOL = 1e-12
NORMALIZATION_TOL = 1e-9


def as_matrix(m, *, name: str = "matrix") -> np.ndarray:
    """Coerce ``m`` to a finite 2-D complex array (1-D input becomes a column)."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.size == 0:
        raise InvalidMatrix(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidMatrix(f"{name} has non-finite entries")
    return arr


def as_vector(v, *, name: str = "vector") -> np.ndarray:
    arr = as_matrix(v, name=name)
    if arr.shape[1] != 1 and arr.shape[0] != 1:
        raise ShapeMismatch(f"{name} must be a vector, got shape {arr.shape}")
    return arr.reshape(-1)


def spectral_norm(m) -> float:
    """Largest singular value."""
    arr = as_matrix(m)
    return float(np.linalg.svd(arr, compute_uv=False)[0])


def trace_norm(m) -> float:
    """Sum of singular values of a square matrix."""
    arr = as_matrix(m)
    if arr.shape[0] != arr.shape[1]:
        raise ShapeMismatch(f"trace norm needs a square matrix, got {arr.shape}")
    return float(np.linalg.svd(arr, compute_uv=False).sum())


def nuclear_norm(m) -> float:
    """Sum of singular values; unlike :func:`trace_norm` any shape is allowed."""
    return float(np.linalg.svd(as_matrix(m), compute_uv=False).sum())


def tensor(*mats) -> np.ndarray:
    """Kronecker product of the arguments, left to right.

    A single list argument is also accepted: ``tensor([a, b]) == tensor(a, b)``.
    """
    if len(mats) == 1 and isinstance(mats[0], (list, tuple)):
        mats = tuple(mats[0])
    if not mats:
        raise ShapeMismatch("tensor needs at least one factor")
    return reduce(np.kron, (np.asarray(m, dtype=complex) for m in mats))


def partial_trace(m, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    ``dims`` lists subsystem dimensions in tensor order; the kept subsystems
    stay in their original relative order.
    """
    arr = as_matrix(m)
    dims = [int(d) for d in dims]
    total = int(np.prod(dims))
    if arr.shape != (total, total):
        raise ShapeMismatch(f"dims {dims} do not match matrix shape {arr.shape}")
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise ShapeMismatch(f"keep indices {keep} out of range for {len(dims)} subsystems")
    n = len(dims)
    t = arr.reshape(dims + dims)
    traced = [k for k in range(n) if k not in keep]
    # Trace from the highest axis down so earlier axis numbers stay valid.
    for k in reversed(traced):
        cur = t.ndim // 2
        t = np.trace(t, axis1=k, axis2=k + cur)
    side = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(side, side)


def is_isometry(u, tol: float = 1e-9) -> bool:
    arr = as_matrix(u)
    gram = arr.conj().T @ arr
    return bool(np.allclose(gram, np.eye(arr.shape[1]), atol=tol, rtol=0))


def is_unitary(u, tol: float = 1e-9) -> bool:
    arr = as_matrix(u)
    return arr.shape[0] == arr.shape[1] and is_isometry(arr, tol)


def _fix_phase(col: np.ndarray) -> complex:
    """Phase that makes the first nonzero entry of ``col`` real non-negative."""
    idx = np.flatnonzero(np.abs(col) > 1e-14)
    if idx.size == 0:
        return 1.0
    z = col[idx[0]]
    return np.conj(z) / abs(z)


@dataclass(frozen=True)
class SchmidtState:
    """Pure bipartite state ``sum_i sqrt(p_i) a_i (x) b_i``.

    ``basis_a`` and ``basis_b`` hold the Schmidt vectors as columns.
    """

    coefficients: np.ndarray
    basis_a: np.ndarray
    basis_b: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.coefficients, dtype=float).reshape(-1)
        a = as_matrix(self.basis_a, name="basis_a")
        b = as_matrix(self.basis_b, name="basis_b")
        if not (a.shape[1] == b.shape[1] == p.size):
            raise ShapeMismatch("Schmidt bases and coefficients disagree on rank")
        if np.any(p < 0):
            raise NotNormalized("Schmidt coefficients must be non-negative")
        if abs(p.sum() - 1.0) > NORMALIZATION_TOL:
            raise NotNormalized(f"Schmidt coefficients sum to {p.sum()!r}, not 1")
        if np.any(np.diff(p) > 0):
            raise InvalidMatrix("Schmidt coefficients must be sorted descending")
        for basis, label in ((a, "basis_a"), (b, "basis_b")):
            if not is_isometry(basis):
                raise InvalidMatrix(f"{label} is not orthonormal")
        object.__setattr__(self, "coefficients", p)
        object.__setattr__(self, "basis_a", a)
        object.__setattr__(self, "basis_b", b)

    @property
    def rank(self) -> int:
        return self.coefficients.size

    @property
    def dim_a(self) -> int:
        return self.basis_a.shape[0]

    @property
    def dim_b(self) -> int:
        return self.basis_b.shape[0]

    def vector(self) -> np.ndarray:
        """The state as a flat vector on ``A (x) B``."""
        amps = np.sqrt(self.coefficients)
        return np.einsum("i,ai,bi->ab", amps, self.basis_a, self.basis_b).reshape(-1)

    @classmethod
    def product(cls, phi_a, phi_b) -> "SchmidtState":
        return schmidt_decompose(np.kron(as_vector(phi_a), as_vector(phi_b)),
                                 as_vector(phi_a).size, as_vector(phi_b).size)


def schmidt_decompose(state, dim_a: int, dim_b: int) -> SchmidtState:
    """Schmidt decomposition of a unit vector on a ``dim_a * dim_b`` space.

    The first nonzero entry of each A-side vector is made real non-negative;
    the compensating phase goes into the B-side vector.
    """
    vec = as_vector(state, name="state")
    if vec.size != dim_a * dim_b:
        raise ShapeMismatch(f"state of length {vec.size} is not {dim_a}x{dim_b}")
    if abs(np.linalg.norm(vec) - 1.0) > NORMALIZATION_TOL:
        raise NotNormalized(f"state has norm {np.linalg.norm(vec)!r}")
    u, s, vh = np.linalg.svd(vec.reshape(dim_a, dim_b), full_matrices=False)
    keep = s > RANK_TOL * s[0]
    s, u, vh = s[keep], u[:, keep], vh[keep, :]
    basis_a = u.copy()
    basis_b = vh.T.copy()
    for i in range(s.size):
        ph = _fix_phase(basis_a[:, i])
        basis_a[:, i] *= ph
        basis_b[:, i] /= ph
    p = s**2
    p = p / p.sum()
    return SchmidtState(p, basis_a, basis_b)


def matrix_to_json(m) -> dict:
    arr = as_matrix(m)
    return {
        "rows": arr.shape[0],
        "cols": arr.shape[1],
        "data": [[float(z.real), float(z.imag)] for z in arr.reshape(-1)],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError) as exc:
        raise InvalidMatrix(f"malformed matrix object: {exc}") from None
    if rows <= 0 or cols <= 0 or len(data) != rows * cols:
        raise InvalidMatrix(f"matrix data has {len(data)} entries, expected {rows}x{cols}")
    flat = np.array([complex(re, im) for re, im in data], dtype=complex)
    return as_matrix(flat.reshape(rows, cols))
