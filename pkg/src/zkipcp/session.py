"""Protocol sessions and transcripts.

A Session owns the seed material; every role and subprotocol derives its
randomness from it through labeled streams, so replaying a seed reproduces a
transcript bit-exactly.  A Transcript is the ordered record of prover
messages, verifier challenges, and oracle answers, plus the verdict and the
output claim when the protocol is a reduction.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field as dc_field
from typing import Any

from .rng import DomainRNG

ACCEPT = "accept"
REJECT = "reject"


@dataclass
class OutputClaim:
    """A reduced claim of the form 'F(point) = value'."""

    point: tuple
    value: int

    def doc(self):
        return {"point": [format(x, "x") for x in self.point], "value": format(self.value, "x")}


@dataclass
class Transcript:
    entries: list = dc_field(default_factory=list)
    verdict: str | None = None
    reason: str | None = None
    output_claim: OutputClaim | None = None

    def prover(self, label: str, data):
        self.entries.append(("prover", label, data))

    def challenge(self, label: str, value: int):
        self.entries.append(("challenge", label, value))

    def oracle(self, label: str, point, value: int):
        self.entries.append(("oracle", label, tuple(point), value))

    def note(self, label: str, data):
        self.entries.append(("note", label, data))

    def reject(self, reason: str):
        self.verdict = REJECT
        self.reason = reason

    def accept(self, claim: OutputClaim | None = None):
        self.verdict = ACCEPT
        self.output_claim = claim

    @property
    def accepted(self) -> bool:
        return self.verdict == ACCEPT

    # -- views ------------------------------------------------------------

    def view_entries(self) -> list:
        """The verifier's view: everything it sees or draws, in order."""
        return [e for e in self.entries if e[0] in ("prover", "challenge", "oracle")]

    def fingerprint(self) -> int:
        """64-bit digest of the canonical view serialization."""
        blob = repr(self.view_entries()).encode()
        return int.from_bytes(hashlib.sha256(blob).digest()[:8], "little")

    def doc(self) -> dict:
        def enc(x):
            if isinstance(x, (tuple, list)):
                return [enc(v) for v in x]
            return x

        return {
            "entries": [enc(list(e)) for e in self.entries],
            "verdict": self.verdict,
            "reason": self.reason,
            "output_claim": self.output_claim.doc() if self.output_claim else None,
        }

    def to_json(self) -> str:
        return json.dumps(self.doc())


class Session:
    """Seed material plus labeled randomness streams for one protocol run."""

    def __init__(self, seed, label: str = "session"):
        self.seed = seed
        self._root = DomainRNG(seed, label)

    def rng(self, label: str) -> DomainRNG:
        return self._root.child(label)
