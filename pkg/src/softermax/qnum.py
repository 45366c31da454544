"""Saturating, bit-exact fixed-point arithmetic in parameterized Q(m,n) formats.

Values are carried as scaled integers (``raw == value * 2**frac_bits``), so
every operation below is exact integer arithmetic and reproduces the same
bits on any platform.  All downstream pipeline stages compute exclusively
through these operations.

Conventions, fixed once for the whole model:
  * quantization rounds to nearest, ties to even
  * right shifts and product rescaling truncate toward -inf (plain shifter)
  * overflow always saturates, never wraps
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction


@dataclass(frozen=True, slots=True)
class QFormat:
    """Fixed-point format with ``int_bits`` integer bits (sign included when
    signed) and ``frac_bits`` fractional bits.

    The raw range bounds are precomputed; QValue construction sits on the
    pipeline's hot path.
    """

    int_bits: int
    frac_bits: int
    signed: bool = True
    width: int = field(init=False, repr=False, compare=False)
    scale: int = field(init=False, repr=False, compare=False)
    min_raw: int = field(init=False, repr=False, compare=False)
    max_raw: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.int_bits < 1:
            raise ValueError("int_bits must be >= 1")
        if self.frac_bits < 0:
            raise ValueError("frac_bits must be >= 0")
        if self.int_bits + self.frac_bits > 32:
            raise ValueError("total width above 32 bits is unsupported")
        w = self.int_bits + self.frac_bits
        object.__setattr__(self, "width", w)
        object.__setattr__(self, "scale", 1 << self.frac_bits)
        if self.signed:
            object.__setattr__(self, "min_raw", -(1 << (w - 1)))
            object.__setattr__(self, "max_raw", (1 << (w - 1)) - 1)
        else:
            object.__setattr__(self, "min_raw", 0)
            object.__setattr__(self, "max_raw", (1 << w) - 1)

    @property
    def min_value(self) -> float:
        return self.min_raw / self.scale

    @property
    def max_value(self) -> float:
        return self.max_raw / self.scale

    @property
    def ulp(self) -> float:
        return 1.0 / self.scale

    def clamp(self, raw: int) -> int:
        """Saturate a raw integer into this format's representable range."""
        if raw < self.min_raw:
            return self.min_raw
        if raw > self.max_raw:
            return self.max_raw
        return raw

    def __str__(self) -> str:
        prefix = "Q" if self.signed else "uQ"
        return f"{prefix}({self.int_bits},{self.frac_bits})"


@dataclass(frozen=True, slots=True)
class QValue:
    """A number in a QFormat, stored as ``raw == value * 2**frac_bits``."""

    raw: int
    fmt: QFormat

    def __post_init__(self) -> None:
        fmt = self.fmt
        if self.raw < fmt.min_raw or self.raw > fmt.max_raw:
            raise ValueError(f"raw {self.raw} out of range for {fmt}")

    @property
    def value(self) -> float:
        return self.raw / self.fmt.scale

    def as_fraction(self) -> Fraction:
        return Fraction(self.raw, self.fmt.scale)

    def __str__(self) -> str:
        return f"{self.value}:{self.fmt}"


# Pipeline formats: signed input scores, unsigned everywhere the math is
# nonnegative.  Slice-local maxima are carried as plain Python ints.
INPUT_FMT = QFormat(6, 2, signed=True)
UNNORMED_FMT = QFormat(1, 15, signed=False)
POWSUM_FMT = QFormat(10, 6, signed=False)
RECIP_FMT = QFormat(1, 7, signed=False)
OUTPUT_FMT = QFormat(1, 7, signed=False)
# LPW slope entries can be negative (reciprocal table), so they get a sign bit.
LPW_SLOPE_FMT = QFormat(1, 15, signed=True)


def quantize(value: float | Fraction | int, fmt: QFormat) -> QValue:
    """Round a real number to the nearest representable value (ties to even),
    saturating at the format limits."""
    if isinstance(value, float) and not math.isfinite(value):
        raise ValueError("non-finite value")
    # round() implements ties-to-even for float, int and Fraction alike.
    raw = round(value * fmt.scale)
    return QValue(fmt.clamp(raw), fmt)


def add_sat(a: QValue, b: QValue) -> QValue:
    """Exact integer sum of raws, saturated.  Operands must share a format."""
    if a.fmt is not b.fmt and a.fmt != b.fmt:
        raise ValueError(f"format mismatch: {a.fmt} vs {b.fmt}")
    return QValue(a.fmt.clamp(a.raw + b.raw), a.fmt)


def mul(a: QValue, b: QValue, out_fmt: QFormat) -> QValue:
    """Full-width integer product, rescaled into ``out_fmt`` by a truncating
    (floor) shift, then saturated."""
    prod = a.raw * b.raw
    shift = a.fmt.frac_bits + b.fmt.frac_bits - out_fmt.frac_bits
    raw = prod >> shift if shift >= 0 else prod << -shift
    return QValue(out_fmt.clamp(raw), out_fmt)


def shift_right(a: QValue, k: int) -> QValue:
    """Arithmetic right shift by ``k >= 0`` with floor semantics, same format."""
    if k < 0:
        raise ValueError("negative shift; use shift_left_sat")
    return QValue(a.raw >> k, a.fmt)


def shift_left_sat(a: QValue, k: int) -> QValue:
    """Left shift by ``k >= 0``, saturating at the format limits."""
    if k < 0:
        raise ValueError("negative shift")
    return QValue(a.fmt.clamp(a.raw << k), a.fmt)


def ceil_to_int(a: QValue) -> int:
    """Smallest integer >= value, as a plain int."""
    return -((-a.raw) >> a.fmt.frac_bits)
