"""The two scalar domains every evaluation runs over.

Exact mode uses arbitrary-precision rationals (stdlib ``fractions.Fraction``,
always in lowest terms, positive denominator).  Fixed mode uses saturating
two's-complement fixed point: ``total_bits`` bits, of which ``frac_bits``
are fractional, truncation toward zero on multiplication and encoding,
saturation on overflow.  Every operation is total and pure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from .errors import FormatMismatchError, InputFormatError

Rational = Fraction


def parse_rational(text: str) -> Fraction:
    """Parse a ``num`` or ``num/den`` decimal string."""
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputFormatError(f"bad rational literal {text!r}: {exc}") from None


def format_rational(x: Fraction) -> str:
    return str(x)


@dataclass(frozen=True)
class FixedPointFormat:
    """Bit layout of a fixed-point number: value = raw / 2**frac_bits."""

    total_bits: int
    frac_bits: int
    signed: bool = True

    scale: int = field(init=False, compare=False, repr=False)
    min_raw: int = field(init=False, compare=False, repr=False)
    max_raw: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if self.total_bits < 1:
            raise InputFormatError("total_bits must be >= 1")
        if not 0 <= self.frac_bits < self.total_bits:
            raise InputFormatError("frac_bits must satisfy 0 <= frac_bits < total_bits")
        object.__setattr__(self, "scale", 1 << self.frac_bits)
        if self.signed:
            object.__setattr__(self, "min_raw", -(1 << (self.total_bits - 1)))
            object.__setattr__(self, "max_raw", (1 << (self.total_bits - 1)) - 1)
        else:
            object.__setattr__(self, "min_raw", 0)
            object.__setattr__(self, "max_raw", (1 << self.total_bits) - 1)

    @property
    def max_value(self) -> Fraction:
        return Fraction(self.max_raw, self.scale)

    @property
    def min_value(self) -> Fraction:
        return Fraction(self.min_raw, self.scale)

    @staticmethod
    def parse(text: str) -> "FixedPointFormat":
        """Parse the ``fx:<total>:<frac>`` format string."""
        parts = text.split(":")
        if len(parts) != 3 or parts[0] != "fx":
            raise InputFormatError(f"bad format string {text!r}, expected fx:<total>:<frac>")
        try:
            total, frac = int(parts[1]), int(parts[2])
        except ValueError:
            raise InputFormatError(f"bad format string {text!r}") from None
        return FixedPointFormat(total, frac)

    def __str__(self) -> str:
        return f"fx:{self.total_bits}:{self.frac_bits}"


#: Canonical 6-bit profile: sign + 2 integer bits + 3 fractional bits.  All
#: interval borders of the previous-bit decoder (1/8 .. 3/2) are exact here.
FX6 = FixedPointFormat(6, 3)


# Raw-mantissa kernels.  The SSM/FNN evaluators run on bare ints for speed;
# the FixedPointValue ops below are thin wrappers over the same functions so
# there is a single definition of the arithmetic.

def raw_saturate(r: int, fmt: FixedPointFormat) -> int:
    if r > fmt.max_raw:
        return fmt.max_raw
    if r < fmt.min_raw:
        return fmt.min_raw
    return r


def raw_encode(x: Fraction, fmt: FixedPointFormat) -> int:
    # int() on a Fraction truncates toward zero.
    return raw_saturate(int(x * fmt.scale), fmt)


def raw_add(a: int, b: int, fmt: FixedPointFormat) -> int:
    return raw_saturate(a + b, fmt)


def raw_mul(a: int, b: int, fmt: FixedPointFormat) -> int:
    p = a * b
    q = p // fmt.scale if p >= 0 else -((-p) // fmt.scale)
    return raw_saturate(q, fmt)


def raw_neg(a: int, fmt: FixedPointFormat) -> int:
    return raw_saturate(-a, fmt)


def raw_relu(a: int) -> int:
    return a if a > 0 else 0


@dataclass(frozen=True)
class FixedPointValue:
    """An integer mantissa tagged with its format."""

    raw: int
    fmt: FixedPointFormat

    def __post_init__(self):
        if not self.fmt.min_raw <= self.raw <= self.fmt.max_raw:
            raise InputFormatError(f"raw mantissa {self.raw} out of range for {self.fmt}")

    @property
    def value(self) -> Fraction:
        return Fraction(self.raw, self.fmt.scale)

    def __str__(self) -> str:
        return f"{self.value} [{self.fmt}]"


Scalar = Union[Fraction, FixedPointValue]


def _require_same_format(a: FixedPointValue, b: FixedPointValue) -> FixedPointFormat:
    if a.fmt != b.fmt:
        raise FormatMismatchError(f"operand formats differ: {a.fmt} vs {b.fmt}")
    return a.fmt


def fx_encode(x: Fraction, fmt: FixedPointFormat) -> FixedPointValue:
    """Quantise a rational: scale, truncate toward zero, saturate."""
    return FixedPointValue(raw_encode(x, fmt), fmt)


def fx_add(a: FixedPointValue, b: FixedPointValue) -> FixedPointValue:
    fmt = _require_same_format(a, b)
    return FixedPointValue(raw_add(a.raw, b.raw, fmt), fmt)


def fx_mul(a: FixedPointValue, b: FixedPointValue) -> FixedPointValue:
    fmt = _require_same_format(a, b)
    return FixedPointValue(raw_mul(a.raw, b.raw, fmt), fmt)


def fx_neg(a: FixedPointValue) -> FixedPointValue:
    return FixedPointValue(raw_neg(a.raw, a.fmt), a.fmt)


def fx_relu(a: FixedPointValue) -> FixedPointValue:
    return FixedPointValue(raw_relu(a.raw), a.fmt)


def fx_max(a: FixedPointValue, b: FixedPointValue) -> FixedPointValue:
    fmt = _require_same_format(a, b)
    return FixedPointValue(max(a.raw, b.raw), fmt)


def fx_cmp(a: FixedPointValue, b: FixedPointValue) -> int:
    """-1, 0 or 1 as a is below, equal to or above b."""
    _require_same_format(a, b)
    return (a.raw > b.raw) - (a.raw < b.raw)


@dataclass(frozen=True)
class ArithMode:
    """Tagged arithmetic domain: exact rationals, or one fixed-point format.

    ``ArithMode()`` / the module constant ``EXACT`` is exact mode;
    ``ArithMode(fmt)`` evaluates everything in ``fmt``.
    """

    fmt: FixedPointFormat | None = None

    @property
    def is_exact(self) -> bool:
        return self.fmt is None

    @staticmethod
    def parse(text: str) -> "ArithMode":
        if text == "exact":
            return ArithMode()
        return ArithMode(FixedPointFormat.parse(text))

    def __str__(self) -> str:
        return "exact" if self.fmt is None else str(self.fmt)


EXACT = ArithMode()
