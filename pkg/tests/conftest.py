"""Shared helpers for the test suite."""

from __future__ import annotations

from softermax import INPUT_FMT, QFormat, QValue, quantize


def qv(value: float, fmt: QFormat = INPUT_FMT) -> QValue:
    """Quantize shortcut for building fixtures."""
    return quantize(value, fmt)


def row_of(values, fmt: QFormat = INPUT_FMT) -> list[QValue]:
    return [quantize(float(v), fmt) for v in values]


def raws(qvals) -> list[int]:
    return [q.raw for q in qvals]
