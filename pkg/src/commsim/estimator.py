"""Random-hyperplane estimation of ``<psi_A|psi_B>`` with shared coins.

Each party sends a quantised norm plus one sign bit per shared Gaussian
direction. The fraction ``f`` of disagreeing signs estimates ``theta / pi``
and the referee outputs ``|psi_A| |psi_B| cos(pi f)``.

Error budget for target ``eps`` with cap ``C >= max(|psi_A|, |psi_B|)``:
norm quantisation contributes at most ``eps / 3`` in total, and the angle
term ``|cos(pi f') - cos(pi f)| C^2 <= pi C^2 |f' - f|`` at most ``eps / 3``,
which Hoeffding gives with probability ``1 - beta`` once
``reps >= ln(2 / beta) / (2 eta^2)`` where ``eta = eps / (3 pi C^2)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import shared_random
from .errors import CapExceeded, DegenerateVector, InvalidParameter, ShapeMismatch
from .reduction import PsiPair, embed_real

DEFAULT_SEED = 20050522


@dataclass(frozen=True)
class EstimationPlan:
    epsilon: float
    beta: float
    C: float
    reps: int
    norm_quantum: float
    seed: int = DEFAULT_SEED

    @property
    def eta(self) -> float:
        """Target accuracy for the disagreement frequency."""
        return self.epsilon / (3 * math.pi * self.C**2)

    @property
    def norm_width(self) -> int:
        """Bits needed for a quantised norm ``round(n / norm_quantum)`` with ``n <= C``."""
        return math.ceil(math.log2(self.C / self.norm_quantum)) + 1

    def with_seed(self, seed: int) -> "EstimationPlan":
        return plan(self.epsilon, self.beta, self.C, seed)


def plan(epsilon: float, beta: float, C: float, seed: int = DEFAULT_SEED) -> EstimationPlan:
    if not 0 < epsilon < 1:
        raise InvalidParameter(f"epsilon must lie in (0, 1), got {epsilon}")
    if not 0 < beta < 1:
        raise InvalidParameter(f"beta must lie in (0, 1), got {beta}")
    if not C >= 1:
        raise InvalidParameter(f"norm cap C must be >= 1, got {C}")
    eta = epsilon / (3 * math.pi * C**2)
    reps = math.ceil(math.log(2 / beta) / (2 * eta**2))
    quantum = epsilon / (6 * C * max(C, 1.0))
    return EstimationPlan(float(epsilon), float(beta), float(C), int(reps), quantum, int(seed))


def quantize_norm(norm: float, p: EstimationPlan) -> int:
    k = int(round(norm / p.norm_quantum))
    if k >= 1 << p.norm_width:
        raise CapExceeded(f"norm {norm} does not fit in {p.norm_width} bits")
    return k


def sign_bits(v: np.ndarray, p: EstimationPlan, stream: int = 0) -> np.ndarray:
    """``sign(<g_r|v>)`` for every shared direction ``g_r``, as booleans (True = +1).

    Only coordinates where ``v`` is nonzero are drawn; ``sign(0)`` is +1.
    """
    v = np.asarray(v, dtype=float).reshape(-1)
    support = np.flatnonzero(v)
    if support.size == 0:
        raise DegenerateVector("cannot estimate with a zero vector")
    out = np.empty(p.reps, dtype=bool)
    for start, block in shared_random.iter_gaussian_rows(p.seed, stream, support, p.reps):
        out[start:start + block.shape[0]] = block @ v[support] >= 0
    return out


def combine(k_a: int, k_b: int, mismatches: int, p: EstimationPlan) -> float:
    """Referee's output from the two quantised norms and the mismatch count."""
    f = mismatches / p.reps
    return (k_a * p.norm_quantum) * (k_b * p.norm_quantum) * math.cos(math.pi * f)


def hyperplane_round(v_a, v_b, p: EstimationPlan, stream: int = 0) -> tuple[float, float]:
    """Return ``(estimate, disagreement_frequency)`` for two real vectors."""
    v_a = np.asarray(v_a, dtype=float).reshape(-1)
    v_b = np.asarray(v_b, dtype=float).reshape(-1)
    if v_a.shape != v_b.shape:
        raise ShapeMismatch("vectors must have the same length")
    s_a = sign_bits(v_a, p, stream)
    s_b = sign_bits(v_b, p, stream)
    mismatches = int(np.count_nonzero(s_a != s_b))
    k_a = quantize_norm(float(np.linalg.norm(v_a)), p)
    k_b = quantize_norm(float(np.linalg.norm(v_b)), p)
    return combine(k_a, k_b, mismatches, p), mismatches / p.reps


def check_cap(norm: float, p: EstimationPlan) -> None:
    if norm > p.C * (1 + 1e-9):
        raise CapExceeded(f"vector norm {norm:.6g} exceeds cap C={p.C:.6g}")


def clamp_probability(x: float) -> float:
    return min(1.0, max(0.0, x))


def estimate_probability(pair: PsiPair, p: EstimationPlan, stream: int = 0,
                         clamp: bool = True) -> float:
    """Estimate ``Re <psi_A|psi_B>`` to within ``epsilon`` w.p. ``1 - beta``."""
    check_cap(pair.norm_a, p)
    check_cap(pair.norm_b, p)
    est, _ = hyperplane_round(embed_real(pair.psi_a), embed_real(pair.psi_b), p, stream)
    return clamp_probability(est) if clamp else est
