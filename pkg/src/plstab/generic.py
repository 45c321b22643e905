"""Deterministic generic-coordinate draws and a posteriori certification.

True algebraic independence cannot be represented with finite rationals, so
coordinates are drawn from per-stream cosets q + r_i whose offsets r_i are
64-bit-entropy rationals derived deterministically from a seed.  Rigor is
restored per run: every determinant or pivot a computation relied on is
recorded and certified nonzero after the fact.

A pool is stateful (per-stream draw counters) and must be confined to one
task; certificates are immutable and freely shareable.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .ratmath import format_rational

_ONE = Fraction(1)


class GenericityError(RuntimeError):
    """Raised when regeneration attempts are exhausted without a clean certificate."""


@dataclass(frozen=True)
class GenericityCertificate:
    """Transcript of values a computation required to be nonzero."""

    conditions: tuple[tuple[str, Fraction], ...]
    failed_index: Optional[int]

    @property
    def ok(self) -> bool:
        return self.failed_index is None

    def to_json_dict(self) -> dict:
        return {
            "status": "ok" if self.ok else "failed",
            "failed_index": self.failed_index,
            "conditions": [
                {"description": d, "value": format_rational(v), "nonzero": v != 0}
                for d, v in self.conditions
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


def certify(transcript: Iterable[tuple[str, Fraction]]) -> GenericityCertificate:
    """Certificate over a transcript; fails at the first zero value."""
    conditions = tuple((d, v) for d, v in transcript)
    failed = next((i for i, (_, v) in enumerate(conditions) if v == 0), None)
    return GenericityCertificate(conditions, failed)


def _derived_seed(*parts) -> int:
    digest = hashlib.sha256(":".join(str(p) for p in parts).encode()).digest()
    return int.from_bytes(digest[:8], "big")


def _u64(seed: int, tag: str, lo: int, hi: int) -> int:
    """Deterministic integer in [lo, hi] from (seed, tag)."""
    span = hi - lo + 1
    acc = 0
    counter = 0
    # enough hash output to make the modulo bias negligible and deterministic
    while acc < span * span:
        block = hashlib.sha256(f"{seed}:{tag}:{counter}".encode()).digest()
        acc = (acc << 256) | int.from_bytes(block, "big")
        counter += 1
    return lo + acc % span


class GenericPool:
    """Seeded source of generic rational coordinates.

    Stream i owns a fixed offset r_i with 64-bit numerator and an odd
    denominator above 2**62; the same (seed, stream) always yields the same
    offset and distinct streams yield distinct offsets.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._offsets: dict[int, Fraction] = {}
        self._counters: dict[int, int] = {}
        self._offset_values: set[Fraction] = set()

    def derive(self, index: int) -> "GenericPool":
        """Child pool for an independent trial; pure function of (seed, index)."""
        return GenericPool(_derived_seed(self.seed, "trial", index))

    def offset(self, stream: int) -> Fraction:
        r = self._offsets.get(stream)
        if r is not None:
            return r
        attempt = 0
        while True:
            num = _u64(self.seed, f"num:{stream}:{attempt}", 1, 2 ** 64 - 1)
            den = _u64(self.seed, f"den:{stream}:{attempt}", 2 ** 62 + 1, 2 ** 64 - 1) | 1
            r = Fraction(num, den)
            if r not in self._offset_values:
                break
            attempt += 1
        self._offsets[stream] = r
        self._offset_values.add(r)
        return r

    def draw_count(self, stream: int) -> int:
        return self._counters.get(stream, 0)

    def draw_near(self, target: Fraction, eps: Fraction, stream: int) -> Fraction:
        """A value q + s*r_stream within eps of target, exactly.

        q is the dyadic rational nearest target at resolution eps/4 and the
        offset copy is shrunk below eps/2 (and further by the stream's draw
        counter, so repeated draws differ).  Advances the counter.
        """
        target = Fraction(target)
        eps = Fraction(eps)
        if eps <= 0:
            raise ValueError("eps must be positive")
        rho = _ONE
        while rho > eps / 4:
            rho /= 2
        while rho * 2 <= eps / 4:
            rho *= 2
        steps = (target / rho + Fraction(1, 2)).__floor__()
        q = steps * rho
        r = self.offset(stream)
        scale = _ONE
        while scale * r >= eps / 2:
            scale /= 2
        count = self._counters.get(stream, 0)
        self._counters[stream] = count + 1
        value = q + scale * r / (2 ** count)
        assert abs(value - target) < eps
        return value
