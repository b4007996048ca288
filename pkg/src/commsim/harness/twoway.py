"""Deterministic two-way classical protocols and their SMP conversion.

A protocol is a bit schedule such as ``"ABAB"`` plus one next-bit function per
party, ``f(own_input, heard, coins) -> bit``, where ``heard`` holds the other
party's bits received so far. The output is the last transcript bit.

In the SMP conversion Alice sends her full response for every possible
string Bob might send (``2**b_B`` strings of ``b_A`` bits) and Bob does the
same; the referee finds the unique mutually consistent pair.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable

from ..errors import MalformedProtocol
from .ledger import BitLedger, Channel, Message

NextBit = Callable[[object, tuple, tuple], int]


@dataclass(frozen=True)
class TwoWayProtocol:
    schedule: str
    alice: NextBit
    bob: NextBit

    def __post_init__(self):
        if set(self.schedule) - {"A", "B"}:
            raise MalformedProtocol(f"schedule may only contain 'A' and 'B': {self.schedule!r}")

    @property
    def bits_a(self) -> int:
        return self.schedule.count("A")

    @property
    def bits_b(self) -> int:
        return self.schedule.count("B")

    @classmethod
    def from_tables(cls, schedule: str, table_a: dict, table_b: dict) -> "TwoWayProtocol":
        """Build from explicit ``{(input, heard_tuple): bit}`` tables (coins ignored)."""
        return cls(schedule,
                   lambda x, heard, coins=(): int(table_a[(x, tuple(heard))]),
                   lambda y, heard, coins=(): int(table_b[(y, tuple(heard))]))


@dataclass(frozen=True)
class TwoWayRun:
    output: int
    transcript: tuple
    ledger: BitLedger


def run_twoway(protocol: TwoWayProtocol, x, y, coins: tuple = ()) -> TwoWayRun:
    """Execute the protocol directly, charging each maximal same-sender burst."""
    channel = Channel()
    sent = {"A": [], "B": []}
    transcript = []
    burst: list[int] = []
    for pos, who in enumerate(protocol.schedule):
        if who == "A":
            bit = int(protocol.alice(x, tuple(sent["B"]), coins)) & 1
        else:
            bit = int(protocol.bob(y, tuple(sent["A"]), coins)) & 1
        sent[who].append(bit)
        transcript.append(bit)
        burst.append(bit)
        last = pos == len(protocol.schedule) - 1
        if last or protocol.schedule[pos + 1] != who:
            src, dst = ("alice", "bob") if who == "A" else ("bob", "alice")
            channel.send(src, dst, Message.from_bits(burst))
            burst = []
    if not transcript:
        raise MalformedProtocol("empty schedule")
    return TwoWayRun(transcript[-1], tuple(transcript), channel.ledger)


def _responses(schedule: str, me: str, fn: NextBit, own, hypothesis: tuple, coins) -> tuple:
    """My bits assuming the other party sends ``hypothesis`` in order."""
    mine, heard = [], 0
    for who in schedule:
        if who == me:
            mine.append(int(fn(own, tuple(hypothesis[:heard]), coins)) & 1)
        else:
            heard += 1
    return tuple(mine)


def response_table(protocol: TwoWayProtocol, party: str, own, coins: tuple = ()) -> dict:
    """``{other_party_string: my_string}`` over all strings of the other's length."""
    if party == "A":
        fn, other_len = protocol.alice, protocol.bits_b
    else:
        fn, other_len = protocol.bob, protocol.bits_a
    return {h: _responses(protocol.schedule, party, fn, own, h, coins)
            for h in product((0, 1), repeat=other_len)}


def interleave(schedule: str, a_bits: tuple, b_bits: tuple) -> tuple:
    ia, ib = iter(a_bits), iter(b_bits)
    return tuple(next(ia) if who == "A" else next(ib) for who in schedule)


def reconstruct_transcript(schedule: str, table_a: dict, table_b: dict) -> tuple:
    """Unique transcript consistent with both response tables."""
    found = []
    for s, r in table_a.items():
        if table_b.get(r) == s:
            found.append(interleave(schedule, r, s))
    if len(found) != 1:
        raise MalformedProtocol(f"{len(found)} consistent transcripts; expected exactly one")
    return found[0]


def _flatten(table: dict, n_hyp: int) -> list[int]:
    return [bit for h in product((0, 1), repeat=n_hyp) for bit in table[h]]


def _unflatten(bits, n_hyp: int, width: int) -> dict:
    out = {}
    for k, h in enumerate(product((0, 1), repeat=n_hyp)):
        out[h] = tuple(int(b) for b in bits[k * width:(k + 1) * width])
    return out


def smp_charged_bits(bits_a: int, bits_b: int) -> int:
    return (1 << bits_b) * bits_a + (1 << bits_a) * bits_b


def twoway_to_smp(protocol: TwoWayProtocol, x, y, coins: tuple = ()) -> TwoWayRun:
    """Run the SMP simulation of ``protocol`` on ``(x, y)`` with shared ``coins``."""
    ba, bb = protocol.bits_a, protocol.bits_b
    channel = Channel()
    msg_a = channel.send("alice", "referee",
                         Message.from_bits(_flatten(response_table(protocol, "A", x, coins), bb)))
    msg_b = channel.send("bob", "referee",
                         Message.from_bits(_flatten(response_table(protocol, "B", y, coins), ba)))
    table_a = _unflatten(msg_a.bits(), bb, ba)
    table_b = _unflatten(msg_b.bits(), ba, bb)
    transcript = reconstruct_transcript(protocol.schedule, table_a, table_b)
    return TwoWayRun(transcript[-1], transcript, channel.ledger)


def equality_protocol(n: int) -> TwoWayProtocol:
    """Bit-by-bit equality test on n-bit integers, schedule ``"AB" * n``.

    Alice reveals bit ``i`` of ``x`` (masked with coin ``i`` when coins are
    supplied); Bob answers with the running AND of the comparisons.
    """

    def bit(v, i):
        return (v >> (n - 1 - i)) & 1

    def mask(coins, i):
        return coins[i] & 1 if i < len(coins) else 0

    def alice(x, heard, coins):
        i = len(heard)
        return bit(x, i) ^ mask(coins, i)

    def bob(y, heard, coins):
        ok = all((heard[i] ^ mask(coins, i)) == bit(y, i) for i in range(len(heard)))
        return int(ok)

    return TwoWayProtocol("AB" * n, alice, bob)
