"""Bipartite operators, their operator-Schmidt decompositions, and the IP family.

Realignment convention used throughout: for ``Q`` on ``A (x) B`` the entry
``Q[(i,k),(j,l)]`` (``i, j`` on A, ``k, l`` on B) becomes ``R[(i,j),(k,l)]``.
A decomposition ``Q = sum_t A_t (x) B_t^dagger`` is then exactly a rank
factorisation ``R = sum_t vec(A_t) vec(B_t^dagger)^T``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import InvalidDecomposition, ShapeMismatch, SizeLimit
from .matcore import RANK_TOL, as_matrix, matrix_from_json, matrix_to_json

DECOMPOSITION_TOL = 1e-8
MAX_IP_N = 6


@dataclass(frozen=True)
class BipartiteOperator:
    dim_a: int
    dim_b: int
    matrix: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.matrix, name="bipartite operator")
        side = self.dim_a * self.dim_b
        if self.dim_a < 1 or self.dim_b < 1 or m.shape != (side, side):
            raise ShapeMismatch(
                f"operator of shape {m.shape} does not act on {self.dim_a}x{self.dim_b}"
            )
        object.__setattr__(self, "matrix", m)

    @property
    def side(self) -> int:
        return self.dim_a * self.dim_b

    def realigned(self) -> np.ndarray:
        return realign(self.matrix, self.dim_a, self.dim_b)

    def to_json(self) -> dict:
        return {"dimA": self.dim_a, "dimB": self.dim_b, **matrix_to_json(self.matrix)}

    @classmethod
    def from_json(cls, obj: dict) -> "BipartiteOperator":
        return cls(int(obj["dimA"]), int(obj["dimB"]), matrix_from_json(obj))


def realign(q: np.ndarray, dim_a: int, dim_b: int) -> np.ndarray:
    return (
        np.asarray(q).reshape(dim_a, dim_b, dim_a, dim_b)
        .transpose(0, 2, 1, 3)
        .reshape(dim_a * dim_a, dim_b * dim_b)
    )


def unrealign(r: np.ndarray, dim_a: int, dim_b: int) -> np.ndarray:
    return (
        np.asarray(r).reshape(dim_a, dim_a, dim_b, dim_b)
        .transpose(0, 2, 1, 3)
        .reshape(dim_a * dim_b, dim_a * dim_b)
    )


@dataclass(frozen=True)
class OperatorDecomposition:
    """Terms ``(A_t, B_t)`` representing ``sum_t A_t (x) B_t^dagger``.

    If ``source`` is given the sum is checked against it on construction.
    """

    terms: tuple
    source: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        terms = tuple((as_matrix(a, name="A_t"), as_matrix(b, name="B_t")) for a, b in self.terms)
        if not terms:
            raise InvalidDecomposition("decomposition has no terms")
        da, db = terms[0][0].shape[0], terms[0][1].shape[0]
        for a, b in terms:
            if a.shape != (da, da) or b.shape != (db, db):
                raise InvalidDecomposition("all A_t (B_t) must be square of one common size")
        object.__setattr__(self, "terms", terms)
        if self.source is not None:
            src = np.asarray(self.source, dtype=complex)
            resid = np.max(np.abs(self.operator() - src))
            if resid > DECOMPOSITION_TOL * max(1.0, np.max(np.abs(src))):
                raise InvalidDecomposition(f"terms reconstruct the source only to {resid:.3e}")

    @property
    def dim_a(self) -> int:
        return self.terms[0][0].shape[0]

    @property
    def dim_b(self) -> int:
        return self.terms[0][1].shape[0]

    def __len__(self) -> int:
        return len(self.terms)

    def operator(self) -> np.ndarray:
        """``sum_t A_t (x) B_t^dagger`` as a dense matrix."""
        r = sum(np.outer(a.reshape(-1), b.conj().T.reshape(-1)) for a, b in self.terms)
        return unrealign(r, self.dim_a, self.dim_b)

    def gram_a(self) -> np.ndarray:
        """``sum_t A_t^dagger A_t``."""
        return sum(a.conj().T @ a for a, _ in self.terms)

    def gram_b(self) -> np.ndarray:
        """``sum_t B_t^dagger B_t``."""
        return sum(b.conj().T @ b for _, b in self.terms)

    def scaled(self, c: complex) -> "OperatorDecomposition":
        """Rescale every term by ``A_t -> c A_t``, ``B_t -> B_t / conj(c)``."""
        return OperatorDecomposition(tuple((c * a, b / np.conj(c)) for a, b in self.terms))

    def lifted(self, dim_f: int, dim_f_b: int | None = None) -> "OperatorDecomposition":
        """Term-wise ``(A_t (x) I_F, B_t (x) I_F)``, matching :func:`lift_with_identity`."""
        fb = dim_f if dim_f_b is None else dim_f_b
        return OperatorDecomposition(
            tuple((np.kron(a, np.eye(dim_f)), np.kron(b, np.eye(fb))) for a, b in self.terms)
        )


def validate_measurement_element(q: BipartiteOperator, tol: float = 1e-9) -> bool:
    """True iff ``q`` is Hermitian with spectrum inside ``[-tol, 1 + tol]``."""
    m = q.matrix if isinstance(q, BipartiteOperator) else as_matrix(q)
    if m.shape[0] != m.shape[1]:
        return False
    if not np.allclose(m, m.conj().T, atol=tol, rtol=0):
        return False
    ev = np.linalg.eigvalsh((m + m.conj().T) / 2)
    return bool(ev[0] >= -tol and ev[-1] <= 1 + tol)


def operator_schmidt(q: BipartiteOperator) -> OperatorDecomposition:
    """Canonical decomposition from the SVD of the realigned matrix.

    Singular values are split evenly, ``sqrt(s_t)`` on each side.
    """
    r = q.realigned()
    u, s, vh = np.linalg.svd(r, full_matrices=False)
    if s[0] == 0:
        keep = np.zeros_like(s, dtype=bool)
        keep[0] = True
    else:
        keep = s > RANK_TOL * s[0]
    terms = []
    for t in np.flatnonzero(keep):
        root = np.sqrt(s[t])
        a = root * u[:, t].reshape(q.dim_a, q.dim_a)
        b_dag = root * vh[t, :].reshape(q.dim_b, q.dim_b)
        terms.append((a, b_dag.conj().T))
    return OperatorDecomposition(tuple(terms), source=q.matrix)


def inner_product_mod2(x: int, y: int) -> int:
    return bin(x & y).count("1") & 1


def ip_matrix(n: int) -> np.ndarray:
    """``M[x, y] = x.y mod 2`` over n-bit strings."""
    size = 1 << n
    return np.array([[inner_product_mod2(x, y) for y in range(size)] for x in range(size)],
                    dtype=float)


def ip_operator(n: int) -> BipartiteOperator:
    """Projector onto basis pairs ``|x>|y>`` with odd ``x.y``."""
    if n < 1:
        raise SizeLimit("n must be positive")
    if n > MAX_IP_N:
        raise SizeLimit(f"IP_n is capped at n={MAX_IP_N} (matrix side 4^n)")
    size = 1 << n
    diag = ip_matrix(n).reshape(-1)
    return BipartiteOperator(size, size, np.diag(diag).astype(complex))


@lru_cache(maxsize=64)
def regroup_permutation(dim_a: int, dim_b: int, dim_fa: int, dim_fb: int) -> np.ndarray:
    """Permutation matrix taking ``N_A (x) N_B (x) F_A (x) F_B`` to
    ``(N_A (x) F_A) (x) (N_B (x) F_B)``.

    Column index is the source ordering, row index the target ordering.
    """
    total = dim_a * dim_b * dim_fa * dim_fb
    src = np.arange(total).reshape(dim_a, dim_b, dim_fa, dim_fb)
    order = src.transpose(0, 2, 1, 3).reshape(-1)
    perm = np.zeros((total, total))
    perm[np.arange(total), order] = 1.0
    perm.setflags(write=False)
    return perm


def lift_with_identity(q: BipartiteOperator, dim_f: int, dim_f_b: int | None = None) -> BipartiteOperator:
    """``Q (x) I_{F_A (x) F_B}`` viewed as an operator on ``(N_A F_A) (x) (N_B F_B)``."""
    fa = int(dim_f)
    fb = fa if dim_f_b is None else int(dim_f_b)
    if fa < 1 or fb < 1:
        raise ShapeMismatch("ancilla dimensions must be positive")
    perm = regroup_permutation(q.dim_a, q.dim_b, fa, fb)
    big = np.kron(q.matrix, np.eye(fa * fb))
    return BipartiteOperator(q.dim_a * fa, q.dim_b * fb, perm @ big @ perm.T)
