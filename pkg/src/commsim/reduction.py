"""Vectors whose inner product is the acceptance probability.

Given ``Q = sum_t A_t (x) B_t^dagger``, the Schmidt form of ``|E>`` and the
local isometries, Alice and Bob each build one vector from their own data
with ``<psi_A|psi_B> = <E|(U (x) V)^dagger Q (U (x) V)|E>``. Entries are
indexed by ``(i, j, t)`` flattened as ``i * (r * T) + j * T + t`` with ``r``
the Schmidt rank and ``T`` the number of terms.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bipartite import OperatorDecomposition
from .errors import InvalidParameter, NotIsometry, NotNormalized, ShapeMismatch
from .matcore import NORMALIZATION_TOL, SchmidtState, as_matrix, as_vector, is_isometry


@dataclass(frozen=True)
class PsiPair:
    psi_a: np.ndarray
    psi_b: np.ndarray

    def __post_init__(self):
        if self.psi_a.shape != self.psi_b.shape:
            raise ShapeMismatch("psi_A and psi_B must have the same length")

    @property
    def norm_a(self) -> float:
        return float(np.linalg.norm(self.psi_a))

    @property
    def norm_b(self) -> float:
        return float(np.linalg.norm(self.psi_b))

    def inner(self) -> complex:
        """``<psi_A|psi_B>`` (conjugate-linear in the first slot)."""
        return complex(np.vdot(self.psi_a, self.psi_b))


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise InvalidParameter(f"alpha must lie in [0, 1], got {alpha}")
    return alpha


def _embedded_basis(iso, basis: np.ndarray, dim_target: int, side: str) -> np.ndarray:
    iso = np.eye(basis.shape[0]) if iso is None else as_matrix(iso, name=f"isometry {side}")
    if not is_isometry(iso):
        raise NotIsometry(f"isometry {side} does not satisfy U^dagger U = I")
    if iso.shape[1] != basis.shape[0]:
        raise ShapeMismatch(f"isometry {side} expects input dimension {iso.shape[1]}, "
                            f"Schmidt basis has {basis.shape[0]}")
    if iso.shape[0] != dim_target:
        raise ShapeMismatch(f"isometry {side} lands in dimension {iso.shape[0]}, "
                            f"operator side is {dim_target}")
    return iso @ basis


def build_psi_a(decomp: OperatorDecomposition, schmidt: SchmidtState, U=None,
                alpha: float = 0.0) -> np.ndarray:
    """Alice's vector: ``sqrt(p_i^alpha p_j^(1-alpha)) <j_A|A_t^dagger|i_A>``."""
    alpha = _check_alpha(alpha)
    ia = _embedded_basis(U, schmidt.basis_a, decomp.dim_a, "U")
    p = schmidt.coefficients
    # elems[t, j, i] = <j_A| A_t^dagger |i_A>
    elems = np.stack([ia.conj().T @ a.conj().T @ ia for a, _ in decomp.terms])
    weight = np.sqrt(np.outer(p**alpha, p ** (1 - alpha)))  # [i, j]
    return (weight[:, :, None] * elems.transpose(2, 1, 0)).reshape(-1)


def build_psi_b(decomp: OperatorDecomposition, schmidt: SchmidtState, V=None,
                alpha: float = 0.0) -> np.ndarray:
    """Bob's vector: ``sqrt(p_i^(1-alpha) p_j^alpha) <i_B|B_t^dagger|j_B>``."""
    alpha = _check_alpha(alpha)
    ib = _embedded_basis(V, schmidt.basis_b, decomp.dim_b, "V")
    p = schmidt.coefficients
    # elems[t, i, j] = <i_B| B_t^dagger |j_B>
    elems = np.stack([ib.conj().T @ b.conj().T @ ib for _, b in decomp.terms])
    weight = np.sqrt(np.outer(p ** (1 - alpha), p**alpha))  # [i, j]
    return (weight[:, :, None] * elems.transpose(1, 2, 0)).reshape(-1)


def build_psi(decomp: OperatorDecomposition, schmidt: SchmidtState, U=None, V=None,
              alpha: float = 0.0) -> PsiPair:
    return PsiPair(build_psi_a(decomp, schmidt, U, alpha), build_psi_b(decomp, schmidt, V, alpha))


def _unit(v, name: str) -> np.ndarray:
    vec = as_vector(v, name=name)
    if abs(np.linalg.norm(vec) - 1.0) > NORMALIZATION_TOL:
        raise NotNormalized(f"{name} has norm {np.linalg.norm(vec)!r}")
    return vec


def product_psi_a(decomp: OperatorDecomposition, phi_a) -> np.ndarray:
    """Alice's entries ``<phi_A|A_t^dagger|phi_A>``, one per term."""
    fa = _unit(phi_a, "phi_A")
    if fa.size != decomp.dim_a:
        raise ShapeMismatch("phi_A does not match the operator's A dimension")
    return np.array([np.vdot(fa, a.conj().T @ fa) for a, _ in decomp.terms])


def product_psi_b(decomp: OperatorDecomposition, phi_b) -> np.ndarray:
    fb = _unit(phi_b, "phi_B")
    if fb.size != decomp.dim_b:
        raise ShapeMismatch("phi_B does not match the operator's B dimension")
    return np.array([np.vdot(fb, b.conj().T @ fb) for _, b in decomp.terms])


def build_psi_product(decomp: OperatorDecomposition, phi_a, phi_b) -> PsiPair:
    """Vectors for an unentangled input ``|phi_A> (x) |phi_B>``."""
    return PsiPair(product_psi_a(decomp, phi_a), product_psi_b(decomp, phi_b))


def embed_real(psi) -> np.ndarray:
    """``[Re psi; Im psi]``; real dot products of embeddings give ``Re <x|y>``."""
    v = np.asarray(psi, dtype=complex).reshape(-1)
    return np.concatenate([v.real, v.imag])
