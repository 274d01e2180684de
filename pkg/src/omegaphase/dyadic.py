"""Exact arithmetic over dyadic rationals p/2^q and finite binary words.

Every comparison against a halting-probability approximation, every
truncation, and the rounding map used after phase estimation go through
this module.  All values are exact; nothing here touches floating point
except the explicit ``__float__`` conversions.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Iterator, Union

__all__ = [
    "Dyadic",
    "BitString",
    "truncate",
    "round_up_mth",
    "interval_Im",
]

DyadicLike = Union["Dyadic", int]

_RATIO_RE = re.compile(r"^([+-]?\d+)\s*/\s*(?:2\^(\d+)|(\d+))$")
_BINARY_RE = re.compile(r"^([+-]?)(\d*)\.([01]*)$")


@total_ordering
class Dyadic:
    """An exact dyadic rational ``numerator / 2**exponent``.

    Canonical form is maintained after every operation: either the
    exponent is zero or the numerator is odd, so equal values always
    have identical ``(numerator, exponent)`` pairs and equality is
    structural.  Numerators are arbitrary-precision integers.
    """

    __slots__ = ("_num", "_exp")

    def __init__(self, numerator: int, exponent: int = 0) -> None:
        if exponent < 0:
            raise ValueError(f"exponent must be non-negative, got {exponent}")
        if numerator == 0:
            exponent = 0
        else:
            # strip shared factors of two
            shift = min(exponent, (numerator & -numerator).bit_length() - 1)
            numerator >>= shift
            exponent -= shift
        object.__setattr__(self, "_num", numerator)
        object.__setattr__(self, "_exp", exponent)

    def __setattr__(self, name: str, value: object) -> None:  # pragma: no cover
        raise AttributeError("Dyadic is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def from_fraction(cls, value: Fraction) -> "Dyadic":
        den = value.denominator
        if den & (den - 1):
            raise ValueError(f"{value} is not dyadic (denominator not a power of 2)")
        return cls(value.numerator, den.bit_length() - 1)

    @classmethod
    def parse(cls, text: str) -> "Dyadic":
        """Parse ``"p/2^q"``, ``"p/q"`` with q a power of two, ``"0.0110"``, or ``"p"``."""
        text = text.strip()
        m = _RATIO_RE.match(text)
        if m:
            num = int(m.group(1))
            if m.group(2) is not None:
                return cls(num, int(m.group(2)))
            den = int(m.group(3))
            if den <= 0 or den & (den - 1):
                raise ValueError(f"denominator of {text!r} is not a power of 2")
            return cls(num, den.bit_length() - 1)
        m = _BINARY_RE.match(text)
        if m:
            sign, intpart, fracpart = m.groups()
            if not intpart and not fracpart:
                raise ValueError(f"cannot parse dyadic literal {text!r}")
            if intpart and set(intpart) - {"0", "1"}:
                raise ValueError(f"non-binary integer part in {text!r}")
            num = (int(intpart, 2) if intpart else 0) << len(fracpart)
            num += int(fracpart, 2) if fracpart else 0
            if sign == "-":
                num = -num
            return cls(num, len(fracpart))
        try:
            return cls(int(text))
        except ValueError:
            raise ValueError(f"cannot parse dyadic literal {text!r}") from None

    # -- accessors ----------------------------------------------------

    @property
    def numerator(self) -> int:
        return self._num

    @property
    def exponent(self) -> int:
        return self._exp

    @property
    def fractional_length(self) -> int:
        """Number of binary fractional digits of the canonical form."""
        return self._exp

    def as_fraction(self) -> Fraction:
        return Fraction(self._num, 1 << self._exp)

    def __float__(self) -> float:
        return self._num / (1 << self._exp)

    def is_integer(self) -> bool:
        return self._exp == 0

    def bit(self, j: int) -> int:
        """The j-th fractional bit (j >= 1) of a value in [0, 1)."""
        if j < 1:
            raise ValueError("bit index must be >= 1")
        if not (0 <= self < 1):
            raise ValueError("fractional bits are defined for values in [0, 1)")
        if j > self._exp:
            return 0
        return (self._num >> (self._exp - j)) & 1

    # -- arithmetic ---------------------------------------------------

    @staticmethod
    def _coerce(value: DyadicLike) -> "Dyadic":
        if isinstance(value, Dyadic):
            return value
        if isinstance(value, int):
            return Dyadic(value)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other: DyadicLike) -> "Dyadic":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        e = max(self._exp, other._exp)
        return Dyadic(
            (self._num << (e - self._exp)) + (other._num << (e - other._exp)), e
        )

    __radd__ = __add__

    def __sub__(self, other: DyadicLike) -> "Dyadic":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: DyadicLike) -> "Dyadic":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other: DyadicLike) -> "Dyadic":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Dyadic(self._num * other._num, self._exp + other._exp)

    __rmul__ = __mul__

    def __neg__(self) -> "Dyadic":
        return Dyadic(-self._num, self._exp)

    def __abs__(self) -> "Dyadic":
        return Dyadic(abs(self._num), self._exp)

    def mod1(self) -> "Dyadic":
        """Reduce into [0, 1); all mod-1 steps in callers are explicit."""
        frac = self._num - ((self._num >> self._exp) << self._exp)
        return Dyadic(frac, self._exp)

    def floor(self) -> int:
        return self._num >> self._exp

    # -- comparisons ---------------------------------------------------

    def _cmp_key(self, other: "Dyadic") -> tuple[int, int]:
        e = max(self._exp, other._exp)
        return self._num << (e - self._exp), other._num << (e - other._exp)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = Dyadic(other)
        if isinstance(other, Dyadic):
            return self._num == other._num and self._exp == other._exp
        if isinstance(other, Fraction):
            return self.as_fraction() == other
        return NotImplemented

    def __lt__(self, other: object) -> bool:
        if isinstance(other, int):
            other = Dyadic(other)
        if isinstance(other, Dyadic):
            a, b = self._cmp_key(other)
            return a < b
        if isinstance(other, Fraction):
            return self.as_fraction() < other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self._num, self._exp))

    # -- formatting ----------------------------------------------------

    def as_ratio_string(self) -> str:
        """Exact fraction string, e.g. ``"3/4"``; integers print bare."""
        if self._exp == 0:
            return str(self._num)
        return f"{self._num}/{1 << self._exp}"

    def to_binary_string(self, frac_bits: int | None = None) -> str:
        """Binary expansion ``"b...b.b1b2...bk"``, optionally zero-padded."""
        if frac_bits is None:
            frac_bits = self._exp
        if frac_bits < self._exp:
            raise ValueError(
                f"value has {self._exp} fractional bits, cannot print in {frac_bits}"
            )
        sign = "-" if self._num < 0 else ""
        scaled = abs(self._num) << (frac_bits - self._exp)
        intpart, fracpart = divmod(scaled, 1 << frac_bits)
        if frac_bits == 0:
            # trailing point marks the digits as binary (bare digits parse
            # as a decimal integer)
            return f"{sign}{intpart:b}."
        return f"{sign}{intpart:b}.{fracpart:0{frac_bits}b}"

    def __repr__(self) -> str:
        return f"Dyadic({self._num}, {self._exp})"

    def __str__(self) -> str:
        return self.as_ratio_string()


ZERO = Dyadic(0)
ONE = Dyadic(1)


class BitString:
    """An immutable finite word over {0, 1}; the empty word is allowed.

    Words of length k round-trip exactly with dyadic fractions of k
    fractional bits via ``to_dyadic`` / ``from_dyadic``.
    """

    __slots__ = ("_bits",)

    def __init__(self, bits: Union[str, Iterable[int]] = "") -> None:
        if isinstance(bits, str):
            text = bits
        else:
            text = "".join(str(int(b)) for b in bits)
        if set(text) - {"0", "1"}:
            raise ValueError(f"bit string may contain only 0 and 1, got {bits!r}")
        object.__setattr__(self, "_bits", text)

    def __setattr__(self, name: str, value: object) -> None:  # pragma: no cover
        raise AttributeError("BitString is immutable")

    @classmethod
    def from_dyadic(cls, value: Dyadic, length: int) -> "BitString":
        """The length-``length`` word whose fraction 0.b1...bk equals ``value``."""
        if not (0 <= value < 1):
            raise ValueError("from_dyadic requires a value in [0, 1)")
        if value.fractional_length > length:
            raise ValueError(
                f"{value} needs {value.fractional_length} bits, got length {length}"
            )
        scaled = value.numerator << (length - value.exponent)
        return cls(f"{scaled:0{length}b}" if length else "")

    def to_dyadic(self) -> Dyadic:
        """The dyadic fraction 0.b1...bk; the empty word maps to 0."""
        if not self._bits:
            return ZERO
        return Dyadic(int(self._bits, 2), len(self._bits))

    def __len__(self) -> int:
        return len(self._bits)

    def __iter__(self) -> Iterator[int]:
        return (int(c) for c in self._bits)

    def __getitem__(self, idx: int) -> int:
        return int(self._bits[idx])

    def __add__(self, other: "BitString") -> "BitString":
        return BitString(self._bits + other._bits)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, BitString):
            return self._bits == other._bits
        if isinstance(other, str):
            return self._bits == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._bits)

    def __str__(self) -> str:
        return self._bits

    def __repr__(self) -> str:
        return f"BitString({self._bits!r})"

    def is_proper_prefix_of(self, other: "BitString") -> bool:
        return len(self) < len(other) and other._bits.startswith(self._bits)

    def all_zero(self) -> bool:
        return set(self._bits) <= {"0"}


def truncate(x: Dyadic, s: int) -> Dyadic:
    """Keep the first ``s`` fractional bits: floor(2^s * x) / 2^s.

    Total on dyadics; result <= x and x - result < 2^-s.
    """
    if s < 0:
        raise ValueError(f"truncation length must be >= 0, got {s}")
    if x.exponent <= s:
        return x
    return Dyadic(x.numerator >> (x.exponent - s), s)


def round_up_mth(x: Dyadic, m: int, n_bits: int | None = None) -> Dyadic:
    """Add 2^-m (mod 1) iff the (m+1)-th fractional bit of ``x`` is set.

    ``n_bits`` declares the working precision: ``x`` must fit in
    ``n_bits`` fractional bits and ``m`` must be strictly smaller.  When
    omitted, the precision defaults to ``max(fractional_length, m + 1)``
    so the (m+1)-th bit is always addressable.  An explicit ``n_bits``
    with ``m >= n_bits`` signals a misconfigured precision schedule.
    """
    if not (0 <= x < 1):
        raise ValueError(f"round_up_mth requires x in [0, 1), got {x}")
    if m < 1:
        raise ValueError(f"rounding position must be >= 1, got {m}")
    if n_bits is None:
        n_bits = max(x.fractional_length, m + 1)
    elif x.fractional_length > n_bits:
        raise ValueError(
            f"{x} has {x.fractional_length} fractional bits, more than n={n_bits}"
        )
    if m >= n_bits:
        raise ValueError(
            f"rounding position m={m} must be < fractional length n={n_bits}"
        )
    if x.bit(m + 1):
        return (x + Dyadic(1, m)).mod1()
    return x


def interval_Im(phi: Dyadic, m: int) -> tuple[Dyadic, ...]:
    """The best m-bit approximations {floor, ceil}(2^m phi)/2^m, mod 1.

    A singleton iff 2^m * phi is an integer; the ceiling member wraps to
    0 when phi lies in the top grid cell.  Members are returned sorted.
    """
    if m < 1:
        raise ValueError(f"precision m must be >= 1, got {m}")
    if not (0 <= phi < 1):
        raise ValueError(f"interval_Im requires phi in [0, 1), got {phi}")
    lo = truncate(phi, m)
    if lo == phi:
        return (lo,)
    hi = (lo + Dyadic(1, m)).mod1()
    return (hi, lo) if hi < lo else (lo, hi)
