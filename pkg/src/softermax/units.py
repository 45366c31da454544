"""Functional models of the slice-level compute units.

Three subunits produce the unnormed phase: integer max (ceiling then max),
power of two (integer/fraction decomposition around the LPW table), and the
reduction tree that merges slice sums into the running denominator.  The
normalization unit then renormalizes each stored numerator with a shifter
and divides via a reciprocal LPW lookup plus an integer multiplier.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .lpw import LpwTable, build_pow2_table, build_recip_table, eval_lpw
from .qnum import (
    OUTPUT_FMT,
    POWSUM_FMT,
    RECIP_FMT,
    UNNORMED_FMT,
    QFormat,
    QValue,
    add_sat,
    ceil_to_int,
    mul,
    shift_left_sat,
    shift_right,
)
from .stats import RunStats


@dataclass(frozen=True, slots=True)
class RowState:
    """Online-normalization state of one row: running integer max and the
    running denominator sum."""

    running_max: int
    running_sum: QValue
    initialized: bool = True

    @classmethod
    def empty(cls, sum_fmt: QFormat = POWSUM_FMT) -> "RowState":
        return cls(0, QValue(0, sum_fmt), initialized=False)


@dataclass(frozen=True, slots=True)
class SliceOutput:
    """Unnormed softmax values of one slice and the max they were computed
    against (needed for the lazy renormalization at output time)."""

    unnormed: tuple[QValue, ...]
    max_used: int


def intmax_slice(xs: Sequence[QValue]) -> int:
    """Max over the element-wise ceilings of a slice (the integer max)."""
    if not xs:
        raise ValueError("empty slice")
    return max(ceil_to_int(x) for x in xs)


def pow2_q(
    x: QValue,
    max_int: int,
    table: LpwTable | None = None,
    out_fmt: QFormat = UNNORMED_FMT,
    stats: RunStats | None = None,
) -> QValue:
    """2**(x - max_int) for x <= max_int, as a fixed-point value in (0, 1].

    The nonpositive exponent splits into floor + fraction; the fraction goes
    through the LPW table and the floor becomes a right shift of the result.
    """
    if table is None:
        table = build_pow2_table()
    n = x.fmt.frac_bits
    delta_raw = x.raw - (max_int << n)
    if delta_raw > 0:
        raise ValueError("exponent above running max")
    int_part = delta_raw >> n            # floor(delta) <= 0
    frac_raw = delta_raw & ((1 << n) - 1)
    if n <= 15:
        frac15 = frac_raw << (15 - n)
    else:
        frac15 = frac_raw >> (n - 15)
    y = eval_lpw(table, QValue(frac15, UNNORMED_FMT), stats)
    y = shift_right(y, -int_part)
    if stats is not None and int_part != 0:
        stats.shift_ops += 1
    if out_fmt != y.fmt:
        y = _narrow(y, out_fmt)
    return y


def _narrow(v: QValue, out_fmt: QFormat) -> QValue:
    """Floor-truncate (or exactly widen) into another format, saturating."""
    d = v.fmt.frac_bits - out_fmt.frac_bits
    raw = v.raw >> d if d >= 0 else v.raw << -d
    return QValue(out_fmt.clamp(raw), out_fmt)


def _tree_sum(vals: list[QValue], stats: RunStats | None) -> QValue:
    """Balanced pairwise summation, left to right at each level.

    The order is fixed so results are reproducible bit-exactly; an odd
    element carries to the next level unchanged.
    """
    level = vals
    while len(level) > 1:
        nxt = []
        for i in range(0, len(level) - 1, 2):
            nxt.append(add_sat(level[i], level[i + 1]))
            if stats is not None:
                stats.add_ops += 1
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    return level[0]


def merge_sums(
    max_a: int, sum_a: QValue, max_b: int, sum_b: QValue, stats: RunStats | None = None
) -> tuple[int, QValue]:
    """Merge two (max, sum) pairs: the side with the smaller max has its sum
    shifted right by the max difference, then the sums add saturating."""
    if max_a >= max_b:
        hi_max, hi_sum, lo_max, lo_sum = max_a, sum_a, max_b, sum_b
    else:
        hi_max, hi_sum, lo_max, lo_sum = max_b, sum_b, max_a, sum_a
    diff = hi_max - lo_max
    if diff:
        lo_sum = shift_right(lo_sum, diff)
        if stats is not None:
            stats.shift_ops += 1
    if stats is not None:
        stats.add_ops += 1
    return hi_max, add_sat(hi_sum, lo_sum)


def reduce_slice(
    slice_vals: Sequence[QValue],
    local_max: int,
    state: RowState,
    powsum_fmt: QFormat = POWSUM_FMT,
    stats: RunStats | None = None,
) -> tuple[RowState, SliceOutput]:
    """Reduce one slice of unnormed values into the running row state.

    Each term is narrowed into the accumulator format (floor) before the
    summation tree.  Merging renormalizes whichever side carries the smaller
    max; a renormalization event is counted only when the accumulated running
    sum itself had to shift (a strictly larger max arrived).
    """
    if not slice_vals:
        raise ValueError("empty slice")
    narrowed = [_narrow(v, powsum_fmt) for v in slice_vals]
    local_sum = _tree_sum(narrowed, stats)
    out = SliceOutput(tuple(slice_vals), local_max)
    if not state.initialized:
        return RowState(local_max, local_sum), out
    if stats is not None and local_max > state.running_max:
        stats.renorm_events += 1
    new_max, new_sum = merge_sums(
        state.running_max, state.running_sum, local_max, local_sum, stats
    )
    return RowState(new_max, new_sum), out


def normalize(
    slices: Sequence[SliceOutput],
    state: RowState,
    recip_table: LpwTable | None = None,
    recip_fmt: QFormat = RECIP_FMT,
    out_fmt: QFormat = OUTPUT_FMT,
    stats: RunStats | None = None,
) -> list[QValue]:
    """Divide every stored numerator by the accumulated denominator.

    The denominator d is leading-one normalized to u * 2**e with u in [1,2);
    the reciprocal LPW gives 1/u, narrowed to the reciprocal format, so the
    declared bitwidth keeps relative precision while 2**-e folds into the
    final output shift.  Per element: shift right by (running max - slice
    max), multiply by the reciprocal mantissa, then apply the exponent shift
    (saturating left shift when e < 0).
    """
    if recip_table is None:
        recip_table = build_recip_table()
    if not state.initialized:
        raise ValueError("normalize on uninitialized state")
    d_raw = state.running_sum.raw
    if d_raw <= 0:
        raise ValueError("vanished denominator")
    frac = state.running_sum.fmt.frac_bits

    p = d_raw.bit_length() - 1
    e = p - frac
    mant_raw = d_raw << (15 - p) if p <= 15 else d_raw >> (p - 15)
    recip15 = eval_lpw(
        recip_table, QValue(mant_raw - (1 << 15), UNNORMED_FMT), stats
    )
    recip = _narrow(recip15, recip_fmt)

    outs: list[QValue] = []
    for sl in slices:
        if sl.max_used > state.running_max:
            raise ValueError("slice max above running max")
        renorm = state.running_max - sl.max_used
        for v in sl.unnormed:
            if renorm:
                v = shift_right(v, renorm)
                if stats is not None:
                    stats.shift_ops += 1
            y = mul(v, recip, out_fmt)
            if stats is not None:
                stats.mul_ops += 1
            if e > 0:
                y = shift_right(y, e)
            elif e < 0:
                y = shift_left_sat(y, -e)
            if stats is not None and e != 0:
                stats.shift_ops += 1
            outs.append(y)
    return outs
