"""Bit accounting and message serialisation between simulated parties."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class BitLedger:
    alice_to_referee: int = 0
    bob_to_referee: int = 0
    alice_bob_roundtrips: list = field(default_factory=list)
    shared_random_bits_drawn: int = 0  # informational, never charged

    @property
    def total(self) -> int:
        return (self.alice_to_referee + self.bob_to_referee
                + sum(bits for _, bits in self.alice_bob_roundtrips))

    def __add__(self, other: "BitLedger") -> "BitLedger":
        return BitLedger(
            self.alice_to_referee + other.alice_to_referee,
            self.bob_to_referee + other.bob_to_referee,
            self.alice_bob_roundtrips + other.alice_bob_roundtrips,
            self.shared_random_bits_drawn + other.shared_random_bits_drawn,
        )


@dataclass(frozen=True)
class Message:
    """Bits packed 8 per byte, MSB first; ``nbits`` is what gets charged."""

    payload: bytes
    nbits: int

    @classmethod
    def from_bits(cls, bits) -> "Message":
        arr = np.asarray(bits, dtype=np.uint8).reshape(-1)
        return cls(np.packbits(arr).tobytes(), int(arr.size))

    def bits(self) -> np.ndarray:
        raw = np.frombuffer(self.payload, dtype=np.uint8)
        return np.unpackbits(raw)[: self.nbits].astype(bool)


def uint_to_bits(value: int, width: int) -> np.ndarray:
    if value < 0 or value >= 1 << width:
        raise ValueError(f"{value} does not fit in {width} unsigned bits")
    return np.array([(value >> (width - 1 - i)) & 1 for i in range(width)], dtype=np.uint8)


def bits_to_uint(bits) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | int(b)
    return out


class Channel:
    """In-process transport that charges every delivered message to a ledger."""

    def __init__(self, ledger: BitLedger | None = None):
        self.ledger = ledger if ledger is not None else BitLedger()
        self.log: list[tuple[str, str, Message]] = []

    def send(self, sender: str, receiver: str, msg: Message) -> Message:
        if receiver == "referee":
            if sender == "alice":
                self.ledger.alice_to_referee += msg.nbits
            elif sender == "bob":
                self.ledger.bob_to_referee += msg.nbits
            else:
                raise ValueError(f"unknown sender {sender!r}")
        else:
            self.ledger.alice_bob_roundtrips.append((f"{sender}->{receiver}", msg.nbits))
        self.log.append((sender, receiver, msg))
        return msg
