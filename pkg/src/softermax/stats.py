"""Operation counters collected while the pipeline runs.

These are proxy activity statistics (shifter activations, multiplier uses,
table lookups, adder uses) rather than timing or energy figures.  Counters
are deterministic for a given input and configuration.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass
class RunStats:
    """Counters for one row, or the aggregate over a matrix.

    ``renorm_events`` counts only rescalings of the accumulated running sum
    (a strictly larger max arrived); shifts applied to an incoming slice sum
    are ordinary ``shift_ops``.
    """

    renorm_events: int = 0
    shift_ops: int = 0
    mul_ops: int = 0
    lut_reads: int = 0
    add_ops: int = 0
    rows: int = 0
    cols: int = 0

    def merge(self, other: "RunStats") -> None:
        self.renorm_events += other.renorm_events
        self.shift_ops += other.shift_ops
        self.mul_ops += other.mul_ops
        self.lut_reads += other.lut_reads
        self.add_ops += other.add_ops

    def asdict(self) -> dict:
        return asdict(self)
