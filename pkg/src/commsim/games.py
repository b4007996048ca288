"""Quantum measurement games and their classical simulation.

A game fixes a shared state ``|E>`` and, for each party, a family of
measurements. A measurement is an isometry ``U`` (the party's local
preparation) followed by a projective measurement ``{P^v}`` on the image.
Simulation estimates every joint outcome probability with its own SMP run
on the single-term decomposition ``P_A^v (x) P_B^v'``, cleans the estimates
into a distribution, and samples one outcome with a shared coin.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import estimator, shared_random
from .bipartite import BipartiteOperator, OperatorDecomposition
from .errors import (EstimationFailure, InvalidScenario, NotIsometry, ShapeMismatch, SizeLimit,
                     UnknownMeasurement)
from .harness.ledger import BitLedger
from .harness.smp import entangled_instance, run_smp
from .matcore import SchmidtState, as_matrix, is_isometry, matrix_from_json, matrix_to_json
from .oracle import Scenario, exact_probability

MAX_OUTCOMES = 64
POVM_TOL = 1e-8
PROJECTOR_TOL = 1e-9

# stream label separating game coins from other uses of the same seed
_GAME_STREAM = 0x6A4E


@dataclass(frozen=True)
class POVM:
    """Isometry ``U`` then the projective measurement ``{label: P}`` on its range."""

    isometry: np.ndarray
    outcomes: tuple  # ((label, projector), ...)

    def __post_init__(self):
        u = as_matrix(self.isometry, name="POVM isometry")
        if not is_isometry(u):
            raise NotIsometry("POVM isometry does not satisfy U^dagger U = I")
        outs = []
        for label, proj in self.outcomes:
            proj = as_matrix(proj, name=f"projector {label!r}")
            if proj.shape != (u.shape[0], u.shape[0]):
                raise ShapeMismatch(f"projector {label!r} must be {u.shape[0]}x{u.shape[0]}")
            if np.max(np.abs(proj @ proj - proj)) > PROJECTOR_TOL or \
                    np.max(np.abs(proj - proj.conj().T)) > PROJECTOR_TOL:
                raise InvalidScenario(f"outcome {label!r} is not an orthogonal projector")
            outs.append((label, proj))
        if not outs:
            raise InvalidScenario("a measurement needs at least one outcome")
        total = sum(u.conj().T @ p @ u for _, p in outs)
        if np.max(np.abs(total - np.eye(u.shape[1]))) > POVM_TOL:
            raise InvalidScenario("effects U^dagger P^v U do not sum to the identity")
        object.__setattr__(self, "isometry", u)
        object.__setattr__(self, "outcomes", tuple(outs))

    @property
    def labels(self) -> list:
        return [label for label, _ in self.outcomes]

    @classmethod
    def projective(cls, projectors, labels=None) -> "POVM":
        projectors = [as_matrix(p) for p in projectors]
        labels = list(range(len(projectors))) if labels is None else list(labels)
        return cls(np.eye(projectors[0].shape[0]), tuple(zip(labels, projectors)))

    def to_json(self) -> dict:
        return {"isometry": matrix_to_json(self.isometry),
                "outcomes": [{"label": label, "projector": matrix_to_json(p)}
                             for label, p in self.outcomes]}

    @classmethod
    def from_json(cls, obj: dict) -> "POVM":
        return cls(matrix_from_json(obj["isometry"]),
                   tuple((o["label"], matrix_from_json(o["projector"])) for o in obj["outcomes"]))


@dataclass(frozen=True)
class MeasurementGame:
    state: SchmidtState
    family_a: tuple
    family_b: tuple

    def __post_init__(self):
        object.__setattr__(self, "family_a", tuple(self.family_a))
        object.__setattr__(self, "family_b", tuple(self.family_b))
        for side, fam, dim in (("A", self.family_a, self.state.dim_a),
                               ("B", self.family_b, self.state.dim_b)):
            for k, m in enumerate(fam):
                if m.isometry.shape[1] != dim:
                    raise ShapeMismatch(f"measurement {side}{k} expects dimension "
                                        f"{m.isometry.shape[1]}, state side has {dim}")

    def choice(self, choice_a: int, choice_b: int) -> tuple[POVM, POVM]:
        for side, fam, c in (("A", self.family_a, choice_a), ("B", self.family_b, choice_b)):
            if not (isinstance(c, (int, np.integer)) and 0 <= c < len(fam)):
                raise UnknownMeasurement(f"party {side} has no measurement {c!r}")
        return self.family_a[choice_a], self.family_b[choice_b]

    def outcome_pairs(self, choice_a: int, choice_b: int) -> list[tuple]:
        ma, mb = self.choice(choice_a, choice_b)
        return [(va, vb) for va in ma.labels for vb in mb.labels]

    def scenario(self, choice_a: int, choice_b: int, va, vb) -> Scenario:
        ma, mb = self.choice(choice_a, choice_b)
        pa, pb = dict(ma.outcomes)[va], dict(mb.outcomes)[vb]
        q = BipartiteOperator(pa.shape[0], pb.shape[0], np.kron(pa, pb))
        return Scenario(q, self.state, ma.isometry, mb.isometry)

    def to_json(self) -> dict:
        st = self.state
        return {"state": {"coefficients": st.coefficients.tolist(),
                          "basis_a": matrix_to_json(st.basis_a),
                          "basis_b": matrix_to_json(st.basis_b)},
                "family_a": [m.to_json() for m in self.family_a],
                "family_b": [m.to_json() for m in self.family_b]}

    @classmethod
    def from_json(cls, obj: dict) -> "MeasurementGame":
        st = obj["state"]
        state = SchmidtState(np.asarray(st["coefficients"], dtype=float),
                             matrix_from_json(st["basis_a"]), matrix_from_json(st["basis_b"]))
        return cls(state, tuple(POVM.from_json(m) for m in obj["family_a"]),
                   tuple(POVM.from_json(m) for m in obj["family_b"]))


def oracle_distribution(game: MeasurementGame, choice_a: int, choice_b: int) -> dict:
    """Exact ``{(v, v'): probability}``."""
    return {pair: exact_probability(game.scenario(choice_a, choice_b, *pair))
            for pair in game.outcome_pairs(choice_a, choice_b)}


def clean_distribution(raw: dict) -> dict:
    """Clip negatives to zero and renormalise; a total below 1/2 means the estimates failed."""
    clipped = {k: max(0.0, float(v)) for k, v in raw.items()}
    total = sum(clipped.values())
    if total < 0.5:
        raise EstimationFailure(f"estimated probabilities sum to {total:.4f} < 1/2")
    return {k: v / total for k, v in clipped.items()}


def statistical_distance(p: dict, q: dict) -> float:
    """``sum |p - q|`` over the union of supports."""
    return float(sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in set(p) | set(q)))


def sample_outcome(dist: dict, u: float):
    """Inverse-CDF draw with ``u`` uniform in ``[0, 1)``; keys in insertion order."""
    acc = 0.0
    last = None
    for key, prob in dist.items():
        acc += prob
        last = key
        if u < acc:
            return key
    return last


@dataclass(frozen=True)
class GameResult:
    outcome: tuple
    distribution: dict
    raw: dict
    ledger: BitLedger
    plan: estimator.EstimationPlan = field(repr=False)


def simulate_game(game: MeasurementGame, choice_a: int, choice_b: int, epsilon: float,
                  beta: float, seed: int = estimator.DEFAULT_SEED) -> GameResult:
    """Estimate each of the ``m`` outcome probabilities to ``epsilon / (2m)`` with
    failure ``beta / m``, clean, and sample one outcome pair."""
    ma, mb = game.choice(choice_a, choice_b)
    pairs = game.outcome_pairs(choice_a, choice_b)
    m = len(pairs)
    if m > MAX_OUTCOMES:
        raise SizeLimit(f"{m} joint outcomes exceeds the limit of {MAX_OUTCOMES}")
    p = estimator.plan(epsilon / (2 * m), beta / m, 1.0, seed)
    pa, pb = dict(ma.outcomes), dict(mb.outcomes)
    raw = {}
    ledger = BitLedger()
    for k, (va, vb) in enumerate(pairs):
        # projectors are Hermitian, so the pair (P_A, P_B) stands for P_A (x) P_B
        decomp = OperatorDecomposition(((pa[va], pb[vb]),))
        inst = entangled_instance(decomp, game.state, ma.isometry, mb.isometry)
        est, run_ledger = run_smp(inst, p, stream=shared_random.derive_stream(_GAME_STREAM, k),
                                  clamp=False)
        raw[(va, vb)] = est
        ledger = ledger + run_ledger
    dist = clean_distribution(raw)
    u = shared_random.uniform(seed, shared_random.derive_stream(_GAME_STREAM, m, 1))
    return GameResult(sample_outcome(dist, u), dist, raw, ledger, p)


# --- standard games -------------------------------------------------------

def singlet() -> SchmidtState:
    """``(|01> - |10>) / sqrt(2)``."""
    return SchmidtState(np.array([0.5, 0.5]), np.eye(2), np.array([[0.0, -1.0], [1.0, 0.0]]))


def spin_measurement(angle: float) -> POVM:
    """Projective spin measurement along ``cos(angle) Z + sin(angle) X``; labels +1 / -1."""
    plus = np.array([np.cos(angle / 2), np.sin(angle / 2)])
    minus = np.array([-np.sin(angle / 2), np.cos(angle / 2)])
    return POVM.projective([np.outer(plus, plus), np.outer(minus, minus)], labels=[1, -1])


def computational_measurement(dim: int = 2) -> POVM:
    return POVM.projective([np.diag(np.eye(dim)[v]) for v in range(dim)])


def anticorrelation_game() -> MeasurementGame:
    """Singlet with both parties measuring the computational basis."""
    return MeasurementGame(singlet(), (computational_measurement(),), (computational_measurement(),))


CHSH_ANGLES_A = (0.0, np.pi / 2)
CHSH_ANGLES_B = (np.pi / 4, -np.pi / 4)


def chsh_game() -> MeasurementGame:
    """Singlet with the standard optimal CHSH spin directions."""
    return MeasurementGame(singlet(), tuple(spin_measurement(a) for a in CHSH_ANGLES_A),
                           tuple(spin_measurement(b) for b in CHSH_ANGLES_B))


def correlator(dist: dict) -> float:
    """``E[v v']`` for +-1 labels."""
    return float(sum(va * vb * prob for (va, vb), prob in dist.items()))


def chsh_value(game: MeasurementGame) -> float:
    """``|E00 + E01 + E10 - E11|`` from the exact oracle distributions."""
    e = [[correlator(oracle_distribution(game, i, j)) for j in range(2)] for i in range(2)]
    return abs(e[0][0] + e[0][1] + e[1][0] - e[1][1])
