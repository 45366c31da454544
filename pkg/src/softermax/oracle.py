"""Double-precision reference softmax and error metrics.

Double precision is the reference plane here: quantized-pipeline errors are
orders of magnitude above 1e-12, so no arbitrary-precision reference is
needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .qnum import QValue


@dataclass
class ErrorReport:
    """Comparison statistics between the fixed-point pipeline and the oracle."""

    max_abs_err: float
    mean_abs_err: float
    max_sum_dev: float
    argmax_match_rate: float
    rows: int
    cols: int
    seed: int | None = None
    distribution: str | None = None


def softmax_ref(xs: Sequence[float] | np.ndarray, base: float = 2.0) -> np.ndarray:
    """Numerically stable softmax: base**(x - max) / sum(base**(x - max))."""
    arr = np.asarray(xs, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("empty input")
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite value")
    shifted = arr - arr.max(axis=-1, keepdims=True)
    if base == 2.0:
        num = np.exp2(shifted)
    elif base == math.e:
        num = np.exp(shifted)
    else:
        num = np.power(base, shifted)
    return num / num.sum(axis=-1, keepdims=True)


def compare(
    fixed_out: Sequence[Sequence[QValue]],
    ref_out: np.ndarray,
    seed: int | None = None,
    distribution: str | None = None,
) -> ErrorReport:
    """Element-wise comparison of a fixed-point output matrix against a real
    reference of the same shape.

    The sum deviation is computed on the fixed outputs only.  A row counts as
    an argmax match when the fixed row attains its maximum at the oracle's
    argmax position (quantization ties at the top keep the match).
    """
    fixed = np.array([[q.value for q in row] for row in fixed_out], dtype=np.float64)
    ref = np.asarray(ref_out, dtype=np.float64)
    if fixed.shape != ref.shape:
        raise ValueError(f"shape mismatch: {fixed.shape} vs {ref.shape}")

    err = np.abs(fixed - ref)
    sum_dev = np.abs(fixed.sum(axis=1) - 1.0)
    ref_arg = ref.argmax(axis=1)
    row_idx = np.arange(fixed.shape[0])
    matches = fixed[row_idx, ref_arg] == fixed.max(axis=1)
    return ErrorReport(
        max_abs_err=float(err.max()),
        mean_abs_err=float(err.mean()),
        max_sum_dev=float(sum_dev.max()),
        argmax_match_rate=float(matches.mean()),
        rows=fixed.shape[0],
        cols=fixed.shape[1],
        seed=seed,
        distribution=distribution,
    )


def exact_online_ref(
    xs: Sequence[float],
    slice_width: int,
    base: float = 2.0,
    int_max: bool = False,
) -> float:
    """Online max/renormalize recurrence in double precision; returns the
    final denominator.

    With ``int_max=True`` the running max is the ceiling-based integer max,
    mirroring the fixed-point pipeline; otherwise the true running max is
    used.  Validates the algorithm's structure independent of quantization.
    """
    if len(xs) == 0:
        raise ValueError("empty input")
    if slice_width < 1:
        raise ValueError("slice_width must be positive")
    run_max = None
    run_sum = 0.0
    for i in range(0, len(xs), slice_width):
        chunk = xs[i : i + slice_width]
        local_max = max(math.ceil(v) for v in chunk) if int_max else max(chunk)
        local_sum = math.fsum(base ** (v - local_max) for v in chunk)
        if run_max is None:
            run_max, run_sum = local_max, local_sum
        elif local_max > run_max:
            run_sum = run_sum * base ** (run_max - local_max) + local_sum
            run_max = local_max
        else:
            run_sum += local_sum * base ** (local_max - run_max)
    return run_sum
