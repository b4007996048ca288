"""JSON documents read and written by the command line.

Every document carries ``"schema_version": 1``. Matrices use
``{"rows", "cols", "data": [[re, im], ...]}`` in row-major order.

Shared states may be given in Schmidt form
(``{"coefficients", "basis_a", "basis_b"}``) or as a raw unit vector
(``{"vector": matrix, "dimA", "dimB"}``).
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .bipartite import BipartiteOperator
from .errors import SchemaError
from .games import MeasurementGame
from .harness.yao import QuantumProtocolSpec
from .matcore import SchmidtState, matrix_from_json, matrix_to_json, schmidt_decompose
from .oracle import Scenario

SCHEMA_VERSION = 1


def read_document(path) -> dict:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(obj, dict):
        raise SchemaError(f"{path}: top level must be an object")
    version = obj.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaError(f"{path}: unsupported schema_version {version!r}")
    return obj


def write_document(path, obj: dict) -> None:
    Path(path).write_text(json.dumps({"schema_version": SCHEMA_VERSION, **obj}, indent=1))


def _field(obj: dict, key: str, where: str):
    try:
        return obj[key]
    except (KeyError, TypeError):
        raise SchemaError(f"{where}: missing field {key!r}") from None


def state_from_json(obj: dict) -> SchmidtState:
    if "vector" in obj:
        vec = matrix_from_json(obj["vector"]).reshape(-1)
        return schmidt_decompose(vec, int(_field(obj, "dimA", "state")),
                                 int(_field(obj, "dimB", "state")))
    return SchmidtState(np.asarray(_field(obj, "coefficients", "state"), dtype=float),
                        matrix_from_json(_field(obj, "basis_a", "state")),
                        matrix_from_json(_field(obj, "basis_b", "state")))


def state_to_json(state: SchmidtState) -> dict:
    return {"coefficients": state.coefficients.tolist(),
            "basis_a": matrix_to_json(state.basis_a),
            "basis_b": matrix_to_json(state.basis_b)}


def operator_from_json(obj: dict) -> BipartiteOperator:
    _field(obj, "dimA", "operator")
    return BipartiteOperator.from_json(obj)


def scenario_from_json(obj: dict) -> Scenario:
    q = operator_from_json(_field(obj, "Q", "scenario"))
    e = state_from_json(_field(obj, "E", "scenario"))
    u = matrix_from_json(obj["U"]) if obj.get("U") is not None else None
    v = matrix_from_json(obj["V"]) if obj.get("V") is not None else None
    return Scenario(q, e, u, v)


def scenario_to_json(s: Scenario) -> dict:
    return {"Q": s.Q.to_json(), "E": state_to_json(s.E),
            "U": matrix_to_json(s.U), "V": matrix_to_json(s.V)}


def protocol_from_json(obj: dict) -> QuantumProtocolSpec:
    rounds = tuple((_field(r, "party", "round"), matrix_from_json(_field(r, "unitary", "round")))
                   for r in _field(obj, "rounds", "protocol"))
    dims = tuple(obj.get("input_dims", (1, 1)))
    return QuantumProtocolSpec(int(_field(obj, "dim_work_a", "protocol")),
                               int(_field(obj, "dim_work_b", "protocol")), rounds, dims)


def protocol_to_json(spec: QuantumProtocolSpec) -> dict:
    return {"dim_work_a": spec.dim_work_a, "dim_work_b": spec.dim_work_b,
            "input_dims": list(spec.input_dims),
            "rounds": [{"party": p, "unitary": matrix_to_json(u)} for p, u in spec.rounds]}


def game_from_json(obj: dict) -> MeasurementGame:
    try:
        return MeasurementGame.from_json(obj)
    except KeyError as exc:
        raise SchemaError(f"game: missing field {exc}") from None
