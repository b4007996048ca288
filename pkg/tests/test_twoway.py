import itertools

import pytest

from commsim.errors import MalformedProtocol
from commsim.harness.twoway import (TwoWayProtocol, equality_protocol, reconstruct_transcript,
                                    response_table, run_twoway, smp_charged_bits, twoway_to_smp)


def test_cost_examples():
    assert smp_charged_bits(2, 2) == 16
    assert smp_charged_bits(3, 0) == 3


def test_one_way_protocol():
    # Alice speaks alone; with nothing to hear, her bits depend only on x
    proto = TwoWayProtocol("AAA", lambda x, heard, coins: x & 1, lambda y, heard, coins: 0)
    run = twoway_to_smp(proto, 5, 0)
    assert run.ledger.total == 3
    assert run.output == 1 == run_twoway(proto, 5, 0).output


def test_equality_exhaustive():
    proto = equality_protocol(2)
    assert proto.bits_a == 2 and proto.bits_b == 2
    for coins in [(), (0, 1), (1, 1), (1, 0)]:
        for x, y in itertools.product(range(4), repeat=2):
            direct = run_twoway(proto, x, y, coins)
            smp = twoway_to_smp(proto, x, y, coins)
            assert direct.output == smp.output == int(x == y)
            assert smp.transcript == direct.transcript
            assert smp.ledger.total == 16
            assert smp.ledger.alice_to_referee == 8 and smp.ledger.bob_to_referee == 8


def test_direct_run_charges_bursts():
    run = run_twoway(equality_protocol(3), 5, 5)
    assert run.ledger.total == 6
    assert [d for d, _ in run.ledger.alice_bob_roundtrips] == ["alice->bob", "bob->alice"] * 3


def test_response_table_shape():
    proto = equality_protocol(2)
    table = response_table(proto, "A", 2)
    assert len(table) == 4 and all(len(v) == 2 for v in table.values())


def test_reconstruct_rejects_inconsistent_tables():
    # Bob's table answers every hypothesis with a string Alice never sent
    # Alice always sends 0 and Bob always answers 1: the only transcript is (0, 1)
    table_a = {(0,): (0,), (1,): (0,)}
    table_b = {(0,): (1,), (1,): (1,)}
    assert reconstruct_transcript("AB", table_a, table_b) == (0, 1)
    with pytest.raises(MalformedProtocol):
        # Alice contradicts whatever Bob would have said, and Bob echoes her
        reconstruct_transcript("AB", {(0,): (1,), (1,): (0,)}, {(0,): (0,), (1,): (1,)})


def test_bad_schedule():
    with pytest.raises(MalformedProtocol):
        TwoWayProtocol("AC", lambda *a: 0, lambda *a: 0)
    with pytest.raises(MalformedProtocol):
        run_twoway(TwoWayProtocol("", lambda *a: 0, lambda *a: 0), 0, 0)


def test_from_tables():
    # one-bit AND: Alice sends x, Bob answers x & y
    table_a = {(x, ()): x for x in (0, 1)}
    table_b = {(y, (x,)): x & y for x in (0, 1) for y in (0, 1)}
    proto = TwoWayProtocol.from_tables("AB", table_a, table_b)
    for x, y in itertools.product((0, 1), repeat=2):
        assert twoway_to_smp(proto, x, y).output == x & y == run_twoway(proto, x, y).output
