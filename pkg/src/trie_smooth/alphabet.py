"""Alphabets, eventually periodic strings and longest common prefixes.

Symbols are dense indices ``0..r-1`` internally; the single-character names
only appear when parsing or printing.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

from .errors import AlphabetError


@dataclass(frozen=True)
class Alphabet:
    symbols: Tuple[str, ...]

    def __post_init__(self):
        symbols = tuple(str(s) for s in self.symbols)
        object.__setattr__(self, "symbols", symbols)
        if len(symbols) < 2:
            raise AlphabetError(f"an alphabet needs at least two symbols, got {len(symbols)}")
        if len(set(symbols)) != len(symbols):
            raise AlphabetError(f"duplicate symbols in alphabet {symbols!r}")

    @classmethod
    def binary(cls) -> "Alphabet":
        return cls(("0", "1"))

    @property
    def size(self) -> int:
        return len(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def index(self, name: str) -> int:
        try:
            return self.symbols.index(name)
        except ValueError:
            raise AlphabetError(f"symbol {name!r} is not in alphabet {self.symbols!r}") from None

    def encode(self, text: Iterable[str]) -> Tuple[int, ...]:
        """Map a string of single-character symbol names to indices."""
        return tuple(self.index(ch) for ch in text)

    def decode(self, indices: Iterable[int]) -> str:
        return "".join(self.symbols[i] for i in indices)


@dataclass(frozen=True)
class StringSpec:
    """A finite string, or the infinite string ``prefix . period . period ...``."""

    alphabet: Alphabet
    prefix: Tuple[int, ...] = ()
    period: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(int(x) for x in self.prefix))
        if self.period is not None:
            object.__setattr__(self, "period", tuple(int(x) for x in self.period))
            if not self.period:
                raise AlphabetError("a period must be nonempty")
        r = self.alphabet.size
        for x in self.prefix + (self.period or ()):
            if not 0 <= x < r:
                raise AlphabetError(f"symbol index {x} out of range for alphabet of size {r}")

    @classmethod
    def finite(cls, alphabet: Alphabet, text: str) -> "StringSpec":
        return cls(alphabet, alphabet.encode(text))

    @classmethod
    def periodic(cls, alphabet: Alphabet, prefix: str, period: str) -> "StringSpec":
        return cls(alphabet, alphabet.encode(prefix), alphabet.encode(period))

    @classmethod
    def from_json(cls, obj: dict, alphabet: Alphabet) -> "StringSpec":
        """Parse ``{"prefix": "ab", "period": "c"}``; omit ``period`` for finite strings."""
        if not isinstance(obj, dict):
            raise AlphabetError(f"string spec must be an object, got {type(obj).__name__}")
        unknown = set(obj) - {"prefix", "period"}
        if unknown:
            raise AlphabetError(f"unknown string spec keys: {sorted(unknown)}")
        period = obj.get("period")
        return cls(
            alphabet,
            alphabet.encode(obj.get("prefix", "")),
            None if period is None else alphabet.encode(period),
        )

    def to_json(self) -> dict:
        out = {"prefix": self.alphabet.decode(self.prefix)}
        if self.period is not None:
            out["period"] = self.alphabet.decode(self.period)
        return out

    @property
    def is_infinite(self) -> bool:
        return self.period is not None

    def __len__(self) -> int:
        if self.period is not None:
            raise TypeError("infinite string has no length")
        return len(self.prefix)

    def symbol_at(self, i: int) -> int:
        """Return the symbol at 1-based position ``i``."""
        if i < 1:
            raise IndexError(f"positions are 1-based, got {i}")
        k = len(self.prefix)
        if i <= k:
            return self.prefix[i - 1]
        if self.period is None:
            raise IndexError(f"position {i} beyond finite string of length {k}")
        return self.period[(i - k - 1) % len(self.period)]

    def window(self, n: int) -> Tuple[int, ...]:
        """The first ``min(n, |s|)`` symbols as a tuple."""
        if self.period is None or n <= len(self.prefix):
            return self.prefix[:n]
        rest = n - len(self.prefix)
        reps = -(-rest // len(self.period))
        return self.prefix + (self.period * reps)[:rest]

    def describe(self) -> str:
        text = self.alphabet.decode(self.prefix)
        if self.period is not None:
            text += "(" + self.alphabet.decode(self.period) + ")^inf"
        return text


@dataclass(frozen=True)
class LcpResult:
    """Longest common prefix length; ``capped`` means no mismatch within ``cap``."""

    length: int
    cap: int
    capped: bool = False

    @property
    def value(self):
        return "capped" if self.capped else self.length


def common_prefix_length(a: Sequence[int], b: Sequence[int]) -> int:
    n = min(len(a), len(b))
    for i in range(n):
        if a[i] != b[i]:
            return i
    return n


def lcp(s: StringSpec, t: StringSpec, cap: int) -> LcpResult:
    """Length of the longest common prefix of ``s`` and ``t``, examined up to ``cap``.

    The end of a finite string counts as a symbol of its own: two equal
    finite strings never mismatch and are reported as capped, while a proper
    prefix mismatches right after its last symbol.
    """
    if cap < 1:
        raise ValueError(f"cap must be positive, got {cap}")
    if s.alphabet != t.alphabet:
        raise AlphabetError("lcp of strings over different alphabets")
    a, b = s.window(cap), t.window(cap)
    k = common_prefix_length(a, b)
    if k == cap or (len(a) == len(b) == k):
        return LcpResult(cap, cap, capped=True)
    return LcpResult(k, cap)
