"""Row- and matrix-level driver for the one-pass softmax pipeline.

Phase 1 walks the row in lane-width slices, exponentiating each slice
against its own integer max and folding the slice sum into the running
denominator.  Phase 2 renormalizes the retained numerators and divides.

Two arithmetic modes share this control flow:

  * "quantized": every step uses the saturating fixed-point operations.
  * "exact": the same steps on arbitrary-precision dyadic rationals
    (integer mantissa, power-of-two scale) with no truncation, narrowing
    or saturation anywhere.  Shifts become exact scalings, so this mode
    isolates the algorithm's structure from quantization effects.

Two-pass variants (global integer max known before summation) are provided
as references for the online-normalization equivalence tests.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .lpw import LpwTable, build_pow2_table, build_recip_table
from .qnum import (
    INPUT_FMT,
    OUTPUT_FMT,
    POWSUM_FMT,
    RECIP_FMT,
    UNNORMED_FMT,
    QFormat,
    QValue,
)
from .stats import RunStats
from .units import (
    RowState,
    SliceOutput,
    intmax_slice,
    merge_sums,
    normalize,
    pow2_q,
    reduce_slice,
)

STANDARD_LANE_WIDTHS = (16, 32)


@dataclass(frozen=True)
class PipelineFormats:
    """The five pipeline bitwidths, overridable for experiments."""

    input: QFormat = INPUT_FMT
    unnormed: QFormat = UNNORMED_FMT
    powsum: QFormat = POWSUM_FMT
    recip: QFormat = RECIP_FMT
    output: QFormat = OUTPUT_FMT


@dataclass(frozen=True)
class EngineConfig:
    lane_width: int = 16
    formats: PipelineFormats = field(default_factory=PipelineFormats)
    mode: str = "quantized"

    def __post_init__(self) -> None:
        if self.lane_width < 1:
            raise ValueError("lane_width must be positive")
        if self.mode not in ("quantized", "exact"):
            raise ValueError(f"unknown mode {self.mode!r}")

    @property
    def lane_width_is_standard(self) -> bool:
        return self.lane_width in STANDARD_LANE_WIDTHS


@dataclass
class RowResult:
    outputs: list[QValue]
    stats: RunStats
    state: RowState | None = None
    exact_denominator: Fraction | None = None


def merge_row_states(a: RowState, b: RowState) -> RowState:
    """Merge two initialized row states; the smaller-max side's sum is
    shifted right by the max difference before the saturating add."""
    if not (a.initialized and b.initialized):
        raise ValueError("cannot merge uninitialized row state")
    new_max, new_sum = merge_sums(a.running_max, a.running_sum, b.running_max, b.running_sum)
    return RowState(new_max, new_sum)


def softermax_row(xs: Sequence[QValue], cfg: EngineConfig) -> tuple[list[QValue], RunStats]:
    """One row through the full pipeline; outputs in input order."""
    r = softermax_row_detailed(xs, cfg)
    return r.outputs, r.stats


def softermax_row_detailed(xs: Sequence[QValue], cfg: EngineConfig) -> RowResult:
    """Like softermax_row but also exposes the final denominator state."""
    if not xs:
        raise ValueError("empty row")
    if cfg.mode == "exact":
        return _row_exact(xs, cfg, two_pass=False)
    state, slices, stats = accumulate_row(xs, cfg)
    fmts = cfg.formats
    outs = normalize(slices, state, build_recip_table(), fmts.recip, fmts.output, stats)
    return RowResult(outs, stats, state=state)


def accumulate_row(
    xs: Sequence[QValue], cfg: EngineConfig, initial: RowState | None = None
) -> tuple[RowState, list[SliceOutput], RunStats]:
    """Phase 1 only: slice, exponentiate against slice-local maxes, reduce.

    Returns the final row state plus the retained slice outputs that phase 2
    (normalize) consumes.  ``initial`` seeds the running state, which the
    two-pass reference uses to pin the global max up front.
    """
    if not xs:
        raise ValueError("empty row")
    stats = RunStats(rows=1, cols=len(xs))
    pow2_table = build_pow2_table()
    fmts = cfg.formats
    state = initial if initial is not None else RowState.empty(fmts.powsum)
    slices: list[SliceOutput] = []
    for chunk in _chunks(xs, cfg.lane_width):
        local_max = intmax_slice(chunk)
        vals = [pow2_q(x, local_max, pow2_table, fmts.unnormed, stats) for x in chunk]
        state, sl = reduce_slice(vals, local_max, state, fmts.powsum, stats)
        slices.append(sl)
    return state, slices, stats


def softermax_row_twopass(xs: Sequence[QValue], cfg: EngineConfig) -> RowResult:
    """Reference run with the row's global integer max known up front.

    The slice pipeline is unchanged, but the running state starts at the
    global max so the accumulated sum is never renormalized; only incoming
    slice sums are shifted.  In exact mode each element is exponentiated
    against the global max directly (equivalent, since exact shifts are
    lossless scalings).
    """
    if not xs:
        raise ValueError("empty row")
    if cfg.mode == "exact":
        return _row_exact(xs, cfg, two_pass=True)

    fmts = cfg.formats
    seed = RowState(intmax_slice(xs), QValue(0, fmts.powsum))
    state, slices, stats = accumulate_row(xs, cfg, initial=seed)
    outs = normalize(slices, state, build_recip_table(), fmts.recip, fmts.output, stats)
    return RowResult(outs, stats, state=state)


def softermax_matrix(
    m: Sequence[Sequence[QValue]], cfg: EngineConfig, workers: int = 1
) -> tuple[list[list[QValue]], RunStats]:
    """Row-independent application over a rectangular matrix.

    Rows are pure work units; with ``workers > 1`` they fan out to a thread
    pool and the results are bit-identical to the serial order.
    """
    if not m:
        raise ValueError("empty matrix")
    cols = len(m[0])
    if cols == 0 or any(len(row) != cols for row in m):
        raise ValueError("matrix must be rectangular and non-empty")

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda row: softermax_row_detailed(row, cfg), m))
    else:
        results = [softermax_row_detailed(row, cfg) for row in m]

    agg = RunStats(rows=len(m), cols=cols)
    for r in results:
        agg.merge(r.stats)
    return [r.outputs for r in results], agg


def _chunks(xs: Sequence[QValue], width: int):
    for i in range(0, len(xs), width):
        yield xs[i : i + width]


# ---------------------------------------------------------------------------
# Exact mode: dyadic rationals as (mantissa, scale) with value = mant * 2**-scale.
# Right shifts add to the scale, so nothing is ever truncated.
# ---------------------------------------------------------------------------


def _dyad_add(a: tuple[int, int], b: tuple[int, int]) -> tuple[int, int]:
    ma, sa = a
    mb, sb = b
    s = sa if sa >= sb else sb
    return (ma << (s - sa)) + (mb << (s - sb)), s


def _round_half_even_div(n: int, d: int) -> int:
    q, r = divmod(n, d)
    r2 = r << 1
    if r2 > d or (r2 == d and q & 1):
        q += 1
    return q


def _dyad_quantize(mant: int, scale: int, fmt: QFormat) -> QValue:
    sh = scale - fmt.frac_bits
    raw = mant << -sh if sh <= 0 else _round_half_even_div(mant, 1 << sh)
    return QValue(fmt.clamp(raw), fmt)


def _lpw_exact(table: LpwTable, frac_raw: int, frac_bits: int, stats: RunStats) -> tuple[int, int]:
    """Exact LPW evaluation: same table, same segment selection, no floor."""
    k = table.index_bits
    if frac_bits >= k:
        s = frac_bits - k
        idx = frac_raw >> s
        w_raw = frac_raw & ((1 << s) - 1)
    else:
        s = 0
        idx = frac_raw << (k - frac_bits)
        w_raw = 0
    stats.lut_reads += 1
    mant = table.c_lut[idx].raw << s
    if w_raw:
        stats.lut_reads += 1
        stats.mul_ops += 1
        stats.add_ops += 1
        mant += table.m_lut[idx].raw * w_raw
    return mant, 15 + s


def _pow2_exact(
    x: QValue, max_int: int, table: LpwTable, stats: RunStats
) -> tuple[int, int]:
    n = x.fmt.frac_bits
    delta_raw = x.raw - (max_int << n)
    if delta_raw > 0:
        raise ValueError("exponent above running max")
    int_part = delta_raw >> n
    frac_raw = delta_raw & ((1 << n) - 1)
    mant, scale = _lpw_exact(table, frac_raw, n, stats)
    if int_part != 0:
        stats.shift_ops += 1
    return mant, scale - int_part


def _row_exact(xs: Sequence[QValue], cfg: EngineConfig, two_pass: bool) -> RowResult:
    stats = RunStats(rows=1, cols=len(xs))
    pow2_table = build_pow2_table()
    recip_table = build_recip_table()

    global_max = intmax_slice(xs) if two_pass else None
    run_max: int | None = global_max
    run_sum: tuple[int, int] = (0, 0)
    slices: list[tuple[list[tuple[int, int]], int]] = []

    for chunk in _chunks(xs, cfg.lane_width):
        base = global_max if two_pass else intmax_slice(chunk)
        vals = [_pow2_exact(x, base, pow2_table, stats) for x in chunk]
        local_sum = vals[0]
        for v in vals[1:]:
            local_sum = _dyad_add(local_sum, v)
            stats.add_ops += 1
        slices.append((vals, base))
        if run_max is None:
            run_max, run_sum = base, local_sum
            continue
        if base > run_max:
            stats.renorm_events += 1
            run_sum = (run_sum[0], run_sum[1] + (base - run_max))
            stats.shift_ops += 1
            run_max = base
        elif base < run_max:
            local_sum = (local_sum[0], local_sum[1] + (run_max - base))
            stats.shift_ops += 1
        run_sum = _dyad_add(run_sum, local_sum)
        stats.add_ops += 1

    d_mant, d_scale = run_sum
    if d_mant <= 0:
        raise ValueError("vanished denominator")

    # leading-one normalization: d = u * 2**e with u in [1,2)
    bl = d_mant.bit_length()
    e = bl - 1 - d_scale
    f_raw = d_mant - (1 << (bl - 1))  # u - 1 at scale bl-1
    r_mant, r_scale = _lpw_exact(recip_table, f_raw, bl - 1, stats)

    out_fmt = cfg.formats.output
    outs: list[QValue] = []
    for vals, base in slices:
        renorm = run_max - base
        if renorm and not two_pass:
            stats.shift_ops += len(vals)
        for m, s in vals:
            stats.mul_ops += 1
            if e != 0:
                stats.shift_ops += 1
            outs.append(_dyad_quantize(m * r_mant, s + renorm + r_scale + e, out_fmt))

    return RowResult(
        outs,
        stats,
        exact_denominator=Fraction(d_mant, 1 << d_scale) if d_scale >= 0
        else Fraction(d_mant << -d_scale),
    )
