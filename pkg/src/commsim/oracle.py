"""Exact quantum-mechanical evaluation, used as ground truth by every test."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bipartite import BipartiteOperator, lift_with_identity, validate_measurement_element
from .errors import InvalidScenario, ShapeMismatch, SizeLimit
from .matcore import SchmidtState, as_matrix, is_isometry

MAX_STATE_DIM = 1 << 12


@dataclass(frozen=True)
class Scenario:
    """Charlie measures ``Q`` on ``(U (x) V)|E>``.

    ``U`` maps Alice's Schmidt space into ``N_A`` or ``N_A (x) F_A``; the
    ancilla ``F_A`` (if any) is traced out before the measurement. Same for
    ``V`` on Bob's side.
    """

    Q: BipartiteOperator
    E: SchmidtState
    U: np.ndarray | None = None
    V: np.ndarray | None = None

    def __post_init__(self):
        U = np.eye(self.E.dim_a) if self.U is None else as_matrix(self.U, name="U")
        V = np.eye(self.E.dim_b) if self.V is None else as_matrix(self.V, name="V")
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "V", V)
        if not validate_measurement_element(self.Q):
            raise InvalidScenario("Q is not a measurement element (0 <= Q <= I)")
        if U.shape[1] != self.E.dim_a or V.shape[1] != self.E.dim_b:
            raise InvalidScenario("isometry input dimension does not match the shared state")
        if not (is_isometry(U) and is_isometry(V)):
            raise InvalidScenario("U and V must be isometries")
        if U.shape[0] % self.Q.dim_a or V.shape[0] % self.Q.dim_b:
            raise InvalidScenario("isometry output dimension must be a multiple of Q's side")
        if U.shape[0] * V.shape[0] > MAX_STATE_DIM:
            raise SizeLimit(f"state dimension {U.shape[0] * V.shape[0]} exceeds {MAX_STATE_DIM}")

    @property
    def ancilla_dims(self) -> tuple[int, int]:
        return self.U.shape[0] // self.Q.dim_a, self.V.shape[0] // self.Q.dim_b

    def lifted_operator(self) -> BipartiteOperator:
        fa, fb = self.ancilla_dims
        if fa == fb == 1:
            return self.Q
        return lift_with_identity(self.Q, fa, fb)

    def embedded_state(self) -> np.ndarray:
        """``(U (x) V)|E>`` as a flat vector."""
        amps = np.sqrt(self.E.coefficients)
        ia = self.U @ self.E.basis_a
        ib = self.V @ self.E.basis_b
        return np.einsum("i,ai,bi->ab", amps, ia, ib).reshape(-1)


def exact_probability(s: Scenario) -> float:
    """``<E|(U (x) V)^dagger Q' (U (x) V)|E>`` with ``Q'`` the ancilla-lifted ``Q``."""
    psi = s.embedded_state()
    q = s.lifted_operator().matrix
    p = np.vdot(psi, q @ psi)
    if abs(p.imag) > 1e-10:
        raise InvalidScenario(f"probability has imaginary part {p.imag:.3e}")
    value = float(p.real)
    if value < -1e-9 or value > 1 + 1e-9:
        raise InvalidScenario(f"probability {value!r} outside [0, 1]")
    return min(1.0, max(0.0, value))


def exact_acceptance_twoway(spec, initial_state) -> float:
    """Direct state-vector run of a two-way quantum protocol.

    The channel qubit starts in ``|0>`` at the first sender. Each round the
    sender applies its unitary to ``work (x) channel``; the qubit then travels
    to the other side. Acceptance is outcome 1 on the channel qubit at the end.
    """
    da, db = spec.dim_work_a, spec.dim_work_b
    phi = np.asarray(initial_state, dtype=complex).reshape(-1)
    if phi.size != da * db:
        raise ShapeMismatch(f"initial state has length {phi.size}, expected {da * db}")
    if da * db * 2 > MAX_STATE_DIM:
        raise SizeLimit("protocol state exceeds the dense simulation cap")
    # axes: (work_a, work_b, channel)
    state = np.zeros((da, db, 2), dtype=complex)
    state[:, :, 0] = phi.reshape(da, db)
    for party, u in spec.rounds:
        if party == "A":
            op = u.reshape(da, 2, da, 2)
            state = np.einsum("acxz,xbz->abc", op, state)
        else:
            op = u.reshape(db, 2, db, 2)
            state = np.einsum("bcyz,ayz->abc", op, state)
    return float(np.sum(np.abs(state[:, :, 1]) ** 2))
