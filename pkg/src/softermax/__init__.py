"""Bit-accurate functional model of a base-2, fixed-point, online-normalized
softmax kernel, with a double-precision oracle and an error-analysis CLI."""

from .engine import (
    EngineConfig,
    PipelineFormats,
    RowResult,
    accumulate_row,
    merge_row_states,
    softermax_matrix,
    softermax_row,
    softermax_row_detailed,
    softermax_row_twopass,
)
from .gen import GenSpec, generate
from .lpw import LpwTable, build_pow2_table, build_recip_table, eval_lpw
from .oracle import ErrorReport, compare, exact_online_ref, softmax_ref
from .qnum import (
    INPUT_FMT,
    OUTPUT_FMT,
    POWSUM_FMT,
    RECIP_FMT,
    UNNORMED_FMT,
    QFormat,
    QValue,
    add_sat,
    ceil_to_int,
    mul,
    quantize,
    shift_left_sat,
    shift_right,
)
from .stats import RunStats
from .units import RowState, SliceOutput, intmax_slice, normalize, pow2_q, reduce_slice

__version__ = "0.1.0"
