"""Linear-piecewise (LPW) approximation tables for 2**f on [0,1) and 1/u on [1,2).

Each table stores per-segment slope (m) and intercept (c) entries in Q(1,15).
Entries are derived by secant (chord) interpolation that is exact at every
segment's left endpoint: ``c[i] = f(left_i)`` quantized, ``m[i] = f(right_i) -
f(left_i)`` quantized, with the within-segment coordinate normalized to
[0,1).  Chords of a monotone convex/concave target keep the evaluated
approximation monotone, which the output-ordering guarantees rely on.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cache

from .qnum import LPW_SLOPE_FMT, UNNORMED_FMT, QValue, quantize
from .stats import RunStats

POW2_SEGMENTS = 4
RECIP_SEGMENTS = 8


@dataclass(frozen=True)
class LpwTable:
    """Slope/intercept lookup tables over a power-of-two segment count."""

    function: str
    num_segments: int
    m_lut: tuple[QValue, ...]
    c_lut: tuple[QValue, ...]
    domain_lo: float
    domain_hi: float

    def __post_init__(self) -> None:
        if self.num_segments & (self.num_segments - 1):
            raise ValueError("num_segments must be a power of two")
        if len(self.m_lut) != self.num_segments or len(self.c_lut) != self.num_segments:
            raise ValueError("LUT length must equal num_segments")

    @property
    def index_bits(self) -> int:
        return self.num_segments.bit_length() - 1

    def to_dict(self) -> dict:
        return {
            "function": self.function,
            "segments": self.num_segments,
            "m_raw": [m.raw for m in self.m_lut],
            "c_raw": [c.raw for c in self.c_lut],
        }


@cache
def build_pow2_table() -> LpwTable:
    """Four-segment table for 2**f, f in [0,1)."""
    c = tuple(quantize(2.0 ** (i / 4), UNNORMED_FMT) for i in range(4))
    m = tuple(
        quantize(2.0 ** ((i + 1) / 4) - 2.0 ** (i / 4), LPW_SLOPE_FMT)
        for i in range(4)
    )
    return LpwTable("pow2", POW2_SEGMENTS, m, c, 0.0, 1.0)


@cache
def build_recip_table() -> LpwTable:
    """Eight-segment table for 1/u, u in [1,2), addressed by u - 1.

    Eight segments keep the chord error below one output ULP (2**-7); the
    endpoint values are exact rationals so no float rounding enters here.
    """
    c = tuple(quantize(Fraction(8, 8 + i), UNNORMED_FMT) for i in range(8))
    m = tuple(
        quantize(Fraction(8, 9 + i) - Fraction(8, 8 + i), LPW_SLOPE_FMT)
        for i in range(8)
    )
    return LpwTable("recip", RECIP_SEGMENTS, m, c, 1.0, 2.0)


def eval_lpw(table: LpwTable, frac_in: QValue, stats: RunStats | None = None) -> QValue:
    """Evaluate the table at ``frac_in`` in [0,1) (domain mapped to the unit
    interval), returning Q(1,15).

    The input is scaled left by log2(num_segments); its integer part selects
    the segment and its fractional part multiplies the slope:
    ``m[idx] * within + c[idx]`` with floor truncation of the product.  When
    the within-segment fraction is zero the slope LUT is not read and the
    result is the intercept, bit-exactly.
    """
    if frac_in.fmt.frac_bits != 15:
        raise ValueError("LPW input must carry 15 fractional bits")
    raw = frac_in.raw
    if not 0 <= raw < (1 << 15):
        raise ValueError("LPW domain violation")

    k = table.index_bits
    idx = raw >> (15 - k)
    within_raw = (raw & ((1 << (15 - k)) - 1)) << k  # Q(1,15) fraction in [0,1)
    c = table.c_lut[idx]
    if stats is not None:
        stats.lut_reads += 1
    if within_raw == 0:
        return c

    if stats is not None:
        stats.lut_reads += 1
        stats.mul_ops += 1
        stats.add_ops += 1
    term = (table.m_lut[idx].raw * within_raw) >> 15
    return QValue(UNNORMED_FMT.clamp(c.raw + term), UNNORMED_FMT)
