import numpy as np
import pytest

from commsim.errors import InvalidProtocol, ShapeMismatch, SizeLimit
from commsim.harness.yao import (QuantumProtocolSpec, input_embedding, random_spec,
                                 simulate_twoway_quantum, twoway_scenario, yao_compile)
from commsim.matcore import SchmidtState, spectral_norm
from commsim.norms import diamond_upper_from
from commsim.oracle import exact_acceptance_twoway, exact_probability

from conftest import random_unit, random_unitary

X = np.array([[0, 1], [1, 0]], dtype=complex)


def diagonal_state(m, coefficients):
    p = np.asarray(coefficients, dtype=float)
    return SchmidtState(p, np.eye(m, p.size), np.eye(m, p.size))


@pytest.mark.parametrize("q", [1, 2, 3])
def test_compiled_acceptance_matches_direct(rng, q):
    spec = random_spec(q, 2, 3, rng)
    compiled = yao_compile(spec)
    assert len(compiled.terms) == 2 ** (q - 1)
    for _ in range(20):
        phi = random_unit(rng, 6)
        assert compiled.acceptance(phi) == pytest.approx(exact_acceptance_twoway(spec, phi), abs=1e-8)


def test_bob_first_protocol(rng):
    rounds = (("B", random_unitary(rng, 4)), ("A", random_unitary(rng, 4)))
    spec = QuantumProtocolSpec(2, 2, rounds)
    phi = random_unit(rng, 4)
    assert yao_compile(spec).acceptance(phi) == pytest.approx(exact_acceptance_twoway(spec, phi))


def test_term_norms_bounded(rng):
    for q in (1, 2, 3, 4):
        for a, b in yao_compile(random_spec(q, 2, 2, rng)).terms.values():
            assert spectral_norm(a) <= 1 + 1e-9 and spectral_norm(b) <= 1 + 1e-9


def test_single_message_one_term(rng):
    spec = random_spec(1, 2, 2, rng)
    assert list(yao_compile(spec).terms) == [()]


def test_identity_rounds_act_trivially_on_work():
    # with identity rounds the compiled operator only touches the channel copies
    da, db = 3, 2
    spec = QuantumProtocolSpec(da, db, (("A", np.eye(2 * da)), ("B", np.eye(2 * db))))
    p = yao_compile(spec).P().reshape(da, 2, db, 2, da, 2, db, 2)
    channel = p[0, :, 0, :, 0, :, 0, :]
    for a, b, c, d in np.ndindex(da, db, da, db):
        block = p[a, :, b, :, c, :, d, :]
        if (a, b) == (c, d):
            np.testing.assert_allclose(block, channel)
        else:
            assert np.all(block == 0)


def test_invalid_specs(rng):
    with pytest.raises(InvalidProtocol):
        QuantumProtocolSpec(1, 1, (("A", 2 * np.eye(2)),))
    with pytest.raises(InvalidProtocol):
        QuantumProtocolSpec(1, 1, (("A", X), ("A", X)))
    with pytest.raises(InvalidProtocol):
        QuantumProtocolSpec(2, 1, (("A", X),))
    with pytest.raises(InvalidProtocol):
        QuantumProtocolSpec(1, 1, (("C", X),))
    with pytest.raises(InvalidProtocol):
        QuantumProtocolSpec(1, 1, ())
    with pytest.raises(SizeLimit):
        yao_compile(random_spec(6, 1, 1, rng))


def test_expanded_decomposition(rng):
    for q in (1, 2, 3):
        compiled = yao_compile(random_spec(q, 2, 2, rng))
        d = compiled.measurement_decomposition()
        np.testing.assert_allclose(d.operator(), compiled.measurement_operator().matrix, atol=1e-10)
        assert len(d) == 4 ** (q - 1)
        assert diamond_upper_from(d) <= 4 ** (q - 1) + 1e-6


def test_scenario_probability_matches(rng):
    spec = random_spec(2, 4, 4, rng, input_dims=(2, 2))
    compiled = yao_compile(spec)
    ent = diagonal_state(2, [0.7, 0.3])
    for x in (0, 1):
        for y in (0, 1):
            s = twoway_scenario(compiled, x, y, ent)
            phi = spec.initial_state(x, y, ent)
            assert exact_probability(s) == pytest.approx(exact_acceptance_twoway(spec, phi), abs=1e-8)
    with pytest.raises(ShapeMismatch):
        twoway_scenario(compiled, 0, 0, diagonal_state(3, [1.0]))
    with pytest.raises(ShapeMismatch):
        input_embedding(2, 2, 1)


def test_idle_register_preserves_acceptance(rng):
    spec = random_spec(2, 2, 2, rng, input_dims=(2, 2))
    wide = spec.with_idle_register(2)
    for x in (0, 1):
        for y in (0, 1):
            small = spec.initial_state(x, y, diagonal_state(1, [1.0]))
            big = wide.initial_state(x, y, diagonal_state(2, [0.5, 0.5]))
            # the idle factor is maximally entangled but never touched
            assert exact_acceptance_twoway(wide, big) == pytest.approx(
                exact_acceptance_twoway(spec, small), abs=1e-10)


def test_deterministic_accept():
    spec = QuantumProtocolSpec(1, 1, (("A", X),))
    res = simulate_twoway_quantum(spec, 0, 0, diagonal_state(1, [1.0]), 0.1, 0.05)
    assert res.estimate >= 0.9


def test_simulation_estimate(rng):
    spec = random_spec(2, 2, 2, rng, input_dims=(1, 1))
    ent = diagonal_state(2, [0.6, 0.4])
    res = simulate_twoway_quantum(spec, 0, 0, ent, 0.2, 0.05, seed=3)
    truth = exact_probability(twoway_scenario(yao_compile(spec), 0, 0, ent))
    assert abs(res.estimate - truth) <= 0.2


def test_ledger_independent_of_entanglement(rng):
    spec = random_spec(2, 4, 4, rng, input_dims=(1, 1))
    bits = set()
    for coefficients in ([1.0], [0.5, 0.5], [0.4, 0.3, 0.2, 0.1]):
        res = simulate_twoway_quantum(spec, 0, 0, diagonal_state(4, coefficients), 0.5, 0.5)
        bits.add(res.ledger.total)
    assert len(bits) == 1
