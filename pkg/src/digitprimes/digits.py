"""Integers whose decimal expansion avoids a fixed set of digits.

Two readings of "decimal expansion" are supported and must be chosen
explicitly.  ``GENUINE`` looks at the usual expansion without leading zeros
(``0`` itself is the one-digit string ``"0"``).  ``PADDED`` looks at the
``k``-digit zero-padded string, which is what gives exponential sums over
``[0, 10^k)`` their exact product structure.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional

import numpy as np


class DigitConvention(enum.Enum):
    PADDED = "padded"
    GENUINE = "genuine"


PADDED = DigitConvention.PADDED
GENUINE = DigitConvention.GENUINE


@dataclass(frozen=True)
class ExcludedDigits:
    """The forbidden digit set ``B``; between one and eight digits."""

    digits: frozenset

    def __init__(self, digits: Iterable[int]):
        ds = [int(d) for d in digits]
        if len(set(ds)) != len(ds):
            raise ValueError(f"duplicate digits in {ds}")
        if any(d < 0 or d > 9 for d in ds):
            raise ValueError(f"digits must lie in 0..9, got {ds}")
        if not 1 <= len(ds) <= 8:
            raise ValueError(f"need 1 to 8 excluded digits, got {len(ds)}")
        object.__setattr__(self, "digits", frozenset(ds))

    @classmethod
    def parse(cls, text: str) -> "ExcludedDigits":
        """From ``"1,3"`` (or ``"13"``)."""
        text = text.strip()
        parts = text.split(",") if "," in text else list(text)
        return cls(int(p) for p in parts if p.strip())

    @property
    def size(self) -> int:
        return len(self.digits)

    @property
    def allowed(self) -> tuple:
        return tuple(n for n in range(10) if n not in self.digits)

    @property
    def gamma(self) -> float:
        return gamma_exponent(self.size)

    def label(self) -> str:
        return "".join(str(d) for d in sorted(self.digits))

    def __iter__(self):
        return iter(sorted(self.digits))

    def __repr__(self):
        return f"ExcludedDigits({{{', '.join(map(str, sorted(self.digits)))}}})"


def as_excluded(B) -> ExcludedDigits:
    if isinstance(B, ExcludedDigits):
        return B
    if isinstance(B, str):
        return ExcludedDigits.parse(B)
    if isinstance(B, int):
        return ExcludedDigits([B])
    return ExcludedDigits(B)


def gamma_exponent(size: int) -> float:
    """``log(10 - |B|) / log 10``, the growth exponent of the set."""
    return math.log(10 - size) / math.log(10)


def _check_padded(n: int, k: Optional[int]):
    if k is None:
        raise ValueError("padding length k is required under the padded convention")
    if n >= 10**k:
        raise ValueError(f"{n} does not fit in {k} padded digits")


def is_member(n: int, B, conv: DigitConvention = GENUINE, k: Optional[int] = None) -> bool:
    B = as_excluded(B)
    if n < 0:
        raise ValueError("n must be nonnegative")
    if conv is PADDED:
        _check_padded(n, k)
        s = str(n).zfill(k)
    else:
        s = str(n)
    return not any(int(c) in B.digits for c in s)


def count_below(k: int, B, conv: DigitConvention = GENUINE) -> int:
    """Number of members in ``[0, 10^k)``."""
    B = as_excluded(B)
    if k < 0:
        raise ValueError("k must be nonnegative")
    a = 10 - B.size
    if conv is PADDED:
        return a**k
    if k == 0:
        return int(0 not in B.digits)
    lead = a - (0 not in B.digits)
    return a + sum(lead * a ** (length - 1) for length in range(2, k + 1))


def _padded_block(length: int, allowed: np.ndarray) -> np.ndarray:
    block = np.zeros(1, dtype=np.int64)
    for _ in range(length):
        block = (block[:, None] * 10 + allowed[None, :]).ravel()
    return block


def member_array(limit: int, B, conv: DigitConvention = GENUINE, k: Optional[int] = None,
                 coprime_to: Optional[int] = None) -> np.ndarray:
    """All members ``<= limit`` in increasing order, as an int64 array."""
    B = as_excluded(B)
    allowed = np.array(B.allowed, dtype=np.int64)
    if limit < 0:
        return np.zeros(0, dtype=np.int64)
    if conv is PADDED:
        _check_padded(0, k)
        out = _padded_block(k, allowed)
    else:
        ndig = len(str(limit))
        blocks = [allowed.copy()]
        lead = allowed[allowed > 0]
        for length in range(2, ndig + 1):
            tail = _padded_block(length - 1, allowed)
            blocks.append((lead[:, None] * 10 ** (length - 1) + tail[None, :]).ravel())
        out = np.concatenate(blocks)
    out = out[out <= limit]
    if coprime_to is not None and coprime_to != 1:
        out = out[np.gcd(out, int(coprime_to)) == 1]
    return out


def enumerate_members(limit: int, B, conv: DigitConvention = GENUINE, coprime_to: Optional[int] = None,
                      k: Optional[int] = None) -> Iterator[int]:
    """Yield members ``<= limit`` in increasing order by walking the digit tree."""
    B = as_excluded(B)
    allowed = B.allowed
    if limit < 0:
        return

    def keep(n):
        return coprime_to is None or math.gcd(n, coprime_to) == 1

    def walk(prefix, remaining):
        # prefix already placed; `remaining` more digits to append
        if remaining == 0:
            if prefix <= limit and keep(prefix):
                yield prefix
            return
        scale = 10**remaining
        for dgt in allowed:
            nxt = prefix * 10 + dgt
            if nxt * scale // 10 > limit:
                return
            yield from walk(nxt, remaining - 1)

    if conv is PADDED:
        _check_padded(0, k)
        yield from walk(0, k)
        return
    for dgt in allowed:
        if dgt <= limit and keep(dgt):
            yield dgt
    for length in range(2, len(str(limit)) + 1):
        for dgt in allowed:
            if dgt == 0:
                continue
            if dgt * 10 ** (length - 1) > limit:
                return
            yield from walk(dgt, length - 1)


def coprime_fraction_kappa(B, k: int, conv: DigitConvention = GENUINE) -> Fraction:
    """Share of members below ``10^k`` that are coprime to 10."""
    B = as_excluded(B)
    if k < 1:
        raise ValueError("k must be at least 1")
    members = member_array(10**k - 1, B, conv, k=k if conv is PADDED else None)
    coprime = int(np.count_nonzero(np.gcd(members, 10) == 1))
    return Fraction(coprime, len(members))
