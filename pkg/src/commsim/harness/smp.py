"""Simultaneous-message runs: Alice and Bob each send one message to a referee."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .. import estimator
from ..bipartite import OperatorDecomposition, operator_schmidt
from ..estimator import EstimationPlan
from ..norms import balance, diamond_upper_from, diamond_upper_optimize
from ..oracle import Scenario
from ..reduction import build_psi_a, build_psi_b, embed_real, product_psi_a, product_psi_b
from .ledger import BitLedger, Channel, Message, bits_to_uint, uint_to_bits


@dataclass(frozen=True)
class SMPInstance:
    """Each callable builds that party's complex vector from its private data only."""

    alice: Callable[[], np.ndarray]
    bob: Callable[[], np.ndarray]


def entangled_instance(decomp: OperatorDecomposition, schmidt, U=None, V=None,
                       alpha: float = 0.0) -> SMPInstance:
    return SMPInstance(lambda: build_psi_a(decomp, schmidt, U, alpha),
                       lambda: build_psi_b(decomp, schmidt, V, alpha))


def product_instance(decomp: OperatorDecomposition, phi_a, phi_b) -> SMPInstance:
    return SMPInstance(lambda: product_psi_a(decomp, phi_a),
                       lambda: product_psi_b(decomp, phi_b))


def _party_message(psi, p: EstimationPlan, stream: int) -> tuple[Message, int]:
    v = embed_real(psi)
    norm = float(np.linalg.norm(v))
    estimator.check_cap(norm, p)
    k = estimator.quantize_norm(norm, p)
    if norm == 0.0:
        # nothing to sketch: the referee's product of norms is already zero
        signs = np.ones(p.reps, dtype=bool)
    else:
        signs = estimator.sign_bits(v, p, stream)
    bits = np.concatenate([uint_to_bits(k, p.norm_width), signs.astype(np.uint8)])
    drawn = int(np.count_nonzero(v)) * p.reps * 64
    return Message.from_bits(bits), drawn


def charged_bits(p: EstimationPlan) -> int:
    """Analytic cost of one run: two messages of ``norm_width + reps`` bits."""
    return 2 * (p.norm_width + p.reps)


def run_smp(instance: SMPInstance, p: EstimationPlan, stream: int = 0,
            clamp: bool = True) -> tuple[float, BitLedger]:
    channel = Channel()
    msg_a, drawn_a = _party_message(instance.alice(), p, stream)
    msg_b, drawn_b = _party_message(instance.bob(), p, stream)
    channel.send("alice", "referee", msg_a)
    channel.send("bob", "referee", msg_b)
    channel.ledger.shared_random_bits_drawn = drawn_a + drawn_b

    # referee
    bits_a, bits_b = msg_a.bits(), msg_b.bits()
    w = p.norm_width
    k_a, k_b = bits_to_uint(bits_a[:w]), bits_to_uint(bits_b[:w])
    mismatches = int(np.count_nonzero(bits_a[w:] != bits_b[w:]))
    est = estimator.combine(k_a, k_b, mismatches, p)
    if clamp:
        est = estimator.clamp_probability(est)
    return est, channel.ledger


@dataclass(frozen=True)
class SimulationResult:
    estimate: float
    ledger: BitLedger
    plan: EstimationPlan
    upper: float
    decomposition: OperatorDecomposition


def cap_from_upper(upper: float) -> float:
    """Norm cap for a balanced decomposition: ``|psi|^2 <= upper``."""
    return max(1.0, math.sqrt(upper))


def simulate_scenario(s: Scenario, epsilon: float, beta: float,
                      seed: int = estimator.DEFAULT_SEED, budget: int | None = None,
                      alpha: float = 0.0) -> SimulationResult:
    """Full pipeline: decompose, balance, build vectors, plan, run SMP.

    ``budget=None`` uses the operator-Schmidt decomposition directly; an
    integer runs the mixing search with that many restarts first. Ancilla
    spaces in ``U``/``V`` are handled by lifting the decomposition term-wise.
    """
    if budget is None:
        decomp = balance(operator_schmidt(s.Q))
    else:
        decomp = diamond_upper_optimize(s.Q, budget, seed).witness_decomposition
    fa, fb = s.ancilla_dims
    if fa > 1 or fb > 1:
        decomp = decomp.lifted(fa, fb)
    upper = diamond_upper_from(decomp)
    p = estimator.plan(epsilon, beta, cap_from_upper(upper), seed)
    est, ledger = run_smp(entangled_instance(decomp, s.E, s.U, s.V, alpha), p)
    return SimulationResult(est, ledger, p, upper, decomp)
