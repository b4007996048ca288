"""Two-way quantum protocols: Yao-style compilation and classical simulation.

Protocol model. Alice holds a work register ``W_A``, Bob holds ``W_B``, and a
single channel qubit starts in ``|0>`` with the first sender. Round ``k``'s
sender applies a unitary to ``W (x) channel`` and hands the qubit over. After
the last round the qubit is measured; outcome 1 accepts.

Compilation. Give each party its own copy of the channel qubit
(``H_A = W_A (x) C_A``, ``H_B = W_B (x) C_B``; both copies start in ``|0>``).
For each transcript ``h`` of the first ``q - 1`` channel bits, the hand-over
in round ``k`` becomes ``|0><h_k|`` on the sender's copy and ``|h_k><0|`` on
the receiver's, and the final round ends with ``|1><1|`` on the sender's copy.
Collecting each party's factors in time order gives ``A_h`` and ``B_h`` with
norm at most one and acceptance ``||sum_h (A_h (x) B_h) |Phi>||^2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Callable

import numpy as np

from .. import estimator
from ..bipartite import BipartiteOperator, OperatorDecomposition
from ..errors import InvalidProtocol, ShapeMismatch, SizeLimit
from ..matcore import SchmidtState, as_matrix, is_unitary
from ..norms import balance, diamond_upper_from
from ..oracle import Scenario
from .smp import SimulationResult, cap_from_upper, entangled_instance, run_smp

MAX_QUBITS = 5

KET0 = np.array([1.0, 0.0])
KET1 = np.array([0.0, 1.0])


@dataclass(frozen=True)
class QuantumProtocolSpec:
    """Rounds are ``(party, unitary on W_party (x) channel)`` with the channel last.

    ``input_dims = (n_x, n_y)`` declares ``W_A = X_A (x) M_A`` and
    ``W_B = Y_B (x) M_B``: a classical input register followed by that
    party's share of prior entanglement.
    """

    dim_work_a: int
    dim_work_b: int
    rounds: tuple
    input_dims: tuple[int, int] = (1, 1)
    builder: Callable | None = field(default=None, compare=False)

    def __post_init__(self):
        rounds = []
        for k, (party, u) in enumerate(self.rounds):
            if party not in ("A", "B"):
                raise InvalidProtocol(f"round {k}: party must be 'A' or 'B'")
            u = as_matrix(u, name=f"round {k} unitary")
            dim = 2 * (self.dim_work_a if party == "A" else self.dim_work_b)
            if u.shape != (dim, dim):
                raise InvalidProtocol(f"round {k}: unitary has shape {u.shape}, expected {dim}x{dim}")
            if not is_unitary(u):
                raise InvalidProtocol(f"round {k}: matrix is not unitary")
            if rounds and rounds[-1][0] == party:
                raise InvalidProtocol("rounds must alternate between the parties")
            rounds.append((party, u))
        if not rounds:
            raise InvalidProtocol("protocol has no rounds")
        nx, ny = self.input_dims
        if self.dim_work_a % nx or self.dim_work_b % ny:
            raise InvalidProtocol("input register dimension must divide the work register")
        object.__setattr__(self, "rounds", tuple(rounds))

    @property
    def q(self) -> int:
        return len(self.rounds)

    @property
    def entanglement_dims(self) -> tuple[int, int]:
        return self.dim_work_a // self.input_dims[0], self.dim_work_b // self.input_dims[1]

    def initial_state(self, *inputs) -> np.ndarray:
        """``|Phi_{x,y}>`` on ``W_A (x) W_B``.

        With a ``builder`` the inputs are passed through to it; otherwise
        ``inputs = (x, y, E)`` and the state is ``|x>|e_A> (x) |y>|e_B>`` summed
        over the Schmidt terms of ``E``.
        """
        if self.builder is not None:
            return np.asarray(self.builder(*inputs), dtype=complex).reshape(-1)
        x, y, ent = inputs
        return (input_embedding(x, self.input_dims[0], self.entanglement_dims[0])
                @ ent.basis_a @ np.diag(np.sqrt(ent.coefficients))
                @ (input_embedding(y, self.input_dims[1], self.entanglement_dims[1])
                   @ ent.basis_b).T).reshape(-1)

    def with_idle_register(self, dim_f: int) -> "QuantumProtocolSpec":
        """Same protocol with an untouched extra factor appended to each ``M``."""
        def widen(u, dw):
            # u acts on (W, C); new space is (W, F, C)
            u4 = u.reshape(dw, 2, dw, 2)
            big = np.einsum("acbd,fg->afcbgd", u4, np.eye(dim_f))
            return big.reshape(dw * dim_f * 2, dw * dim_f * 2)

        rounds = tuple((p, widen(u, self.dim_work_a if p == "A" else self.dim_work_b))
                       for p, u in self.rounds)
        return QuantumProtocolSpec(self.dim_work_a * dim_f, self.dim_work_b * dim_f,
                                   rounds, self.input_dims)


def input_embedding(value: int, n_inputs: int, dim_m: int) -> np.ndarray:
    """Isometry ``|e> -> |value> (x) |e>`` from ``M`` into ``X (x) M``."""
    if not 0 <= value < n_inputs:
        raise ShapeMismatch(f"input {value} outside 0..{n_inputs - 1}")
    basis = np.zeros((n_inputs, 1))
    basis[value, 0] = 1.0
    return np.kron(basis, np.eye(dim_m))


@dataclass(frozen=True)
class CompiledProtocol:
    spec: QuantumProtocolSpec
    terms: dict  # h -> (A_h, B_h)

    @property
    def dim_a(self) -> int:
        return 2 * self.spec.dim_work_a

    @property
    def dim_b(self) -> int:
        return 2 * self.spec.dim_work_b

    def P(self) -> np.ndarray:
        return sum(np.kron(a, b) for a, b in self.terms.values())

    def extend_state(self, phi) -> np.ndarray:
        """Embed ``|Phi>`` on ``W_A (x) W_B`` into ``H_A (x) H_B`` (channel copies in ``|0>``)."""
        da, db = self.spec.dim_work_a, self.spec.dim_work_b
        phi = np.asarray(phi, dtype=complex).reshape(da, db)
        out = np.zeros((da, 2, db, 2), dtype=complex)
        out[:, 0, :, 0] = phi
        return out.reshape(-1)

    def acceptance(self, phi) -> float:
        v = self.P() @ self.extend_state(phi)
        return float(np.vdot(v, v).real)

    def measurement_decomposition(self) -> OperatorDecomposition:
        """``P^dagger P = sum_{h,h'} (A_h'^dagger A_h) (x) (B_h'^dagger B_h)``.

        Stored as pairs ``(A_h'^dagger A_h, B_h^dagger B_h')`` so each pair
        ``(X, Y)`` contributes ``X (x) Y^dagger``.
        """
        items = list(self.terms.values())
        pairs = []
        for a_h, b_h in items:
            for a_k, b_k in items:
                pairs.append((a_k.conj().T @ a_h, b_h.conj().T @ b_k))
        return OperatorDecomposition(tuple(pairs))

    def measurement_operator(self) -> BipartiteOperator:
        p = self.P()
        return BipartiteOperator(self.dim_a, self.dim_b, p.conj().T @ p)


def _on_channel(dim_w: int, op2: np.ndarray) -> np.ndarray:
    return np.kron(np.eye(dim_w), op2)


def yao_compile(spec: QuantumProtocolSpec) -> CompiledProtocol:
    if spec.q > MAX_QUBITS:
        raise SizeLimit(f"compilation is capped at q={MAX_QUBITS} qubits")
    dims = {"A": spec.dim_work_a, "B": spec.dim_work_b}
    terms = {}
    for h in product((0, 1), repeat=spec.q - 1):
        ops = {"A": np.eye(2 * dims["A"], dtype=complex), "B": np.eye(2 * dims["B"], dtype=complex)}
        for k, (sender, u) in enumerate(spec.rounds):
            receiver = "B" if sender == "A" else "A"
            ops[sender] = u @ ops[sender]
            if k < spec.q - 1:
                b = KET1 if h[k] else KET0
                ops[sender] = _on_channel(dims[sender], np.outer(KET0, b)) @ ops[sender]
                ops[receiver] = _on_channel(dims[receiver], np.outer(b, KET0)) @ ops[receiver]
            else:
                ops[sender] = _on_channel(dims[sender], np.outer(KET1, KET1)) @ ops[sender]
        terms[h] = (ops["A"], ops["B"])
    return CompiledProtocol(spec, terms)


def twoway_scenario(compiled: CompiledProtocol, x: int, y: int, ent: SchmidtState) -> Scenario:
    """Measurement scenario ``(P^dagger P, E, U_x, U_y)`` for inputs ``x, y``."""
    spec = compiled.spec
    ma, mb = spec.entanglement_dims
    if ent.dim_a != ma or ent.dim_b != mb:
        raise ShapeMismatch(f"entanglement must live on {ma}x{mb}, got {ent.dim_a}x{ent.dim_b}")
    u = np.kron(input_embedding(x, spec.input_dims[0], ma), KET0.reshape(2, 1))
    v = np.kron(input_embedding(y, spec.input_dims[1], mb), KET0.reshape(2, 1))
    return Scenario(compiled.measurement_operator(), ent, u, v)


def simulate_twoway_quantum(spec: QuantumProtocolSpec, x: int, y: int, ent: SchmidtState,
                            epsilon: float, beta: float,
                            seed: int = estimator.DEFAULT_SEED) -> SimulationResult:
    """Classical SMP estimate of the protocol's acceptance probability on ``(x, y)``.

    The plan depends only on the compiled decomposition, never on ``ent``.
    """
    compiled = yao_compile(spec)
    decomp = balance(compiled.measurement_decomposition())
    upper = diamond_upper_from(decomp)
    p = estimator.plan(epsilon, beta, cap_from_upper(upper), seed)
    s = twoway_scenario(compiled, x, y, ent)
    est, ledger = run_smp(entangled_instance(decomp, s.E, s.U, s.V), p)
    return SimulationResult(est, ledger, p, upper, decomp)


def random_spec(q: int, dim_work_a: int, dim_work_b: int, rng: np.random.Generator,
                input_dims: tuple[int, int] = (1, 1)) -> QuantumProtocolSpec:
    """Protocol with Haar-ish random unitaries (QR of complex Gaussians), Alice first."""
    from scipy.stats import unitary_group

    rounds = []
    for k in range(q):
        party = "A" if k % 2 == 0 else "B"
        dim = 2 * (dim_work_a if party == "A" else dim_work_b)
        rounds.append((party, unitary_group.rvs(dim, random_state=rng)))
    return QuantumProtocolSpec(dim_work_a, dim_work_b, tuple(rounds), input_dims)
