"""Run orchestration: generate or load scores, run the pipeline and the
oracle, assemble machine-readable reports.

Reports are fully deterministic for a given command line and seed: no
timestamps, sorted JSON keys, and float values serialized with shortest
round-trip repr in both JSON and CSV.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
from dataclasses import dataclass

import numpy as np

from .engine import EngineConfig, softermax_matrix
from .gen import GenSpec, generate, load_matrix
from .oracle import compare, softmax_ref
from .qnum import QFormat, QValue

SCHEMA_VERSION = "1"


@dataclass
class Report:
    schema_version: str
    config: dict
    stats: dict
    errors: dict | None

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "config": self.config,
            "stats": self.stats,
            "errors": self.errors,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Report":
        d = json.loads(text)
        return cls(d["schema_version"], d["config"], d["stats"], d["errors"])


def _fmt_dict(fmt: QFormat) -> dict:
    return {"int_bits": fmt.int_bits, "frac_bits": fmt.frac_bits, "signed": fmt.signed}


def _config_echo(
    cfg: EngineConfig,
    spec: GenSpec | None,
    input_path: str | None,
    compare_oracle: bool,
) -> dict:
    return {
        "rows": spec.rows if spec else None,
        "cols": spec.cols if spec else None,
        "distribution": spec.distribution if spec else None,
        "seed": spec.seed if spec else None,
        "input": input_path,
        "lane_width": cfg.lane_width,
        "lane_width_is_standard": cfg.lane_width_is_standard,
        "mode": cfg.mode,
        "compare_oracle": compare_oracle,
        "formats": {
            "input": _fmt_dict(cfg.formats.input),
            "unnormed": _fmt_dict(cfg.formats.unnormed),
            "powsum": _fmt_dict(cfg.formats.powsum),
            "recip": _fmt_dict(cfg.formats.recip),
            "output": _fmt_dict(cfg.formats.output),
        },
    }


def quantize_matrix(reals: np.ndarray, fmt: QFormat) -> list[list]:
    """Pipeline entry: saturating nearest-even quantization of every score.

    Vectorized equivalent of qnum.quantize per element (np.rint is also
    round-half-even), asserted equal in the tests.
    """
    arr = np.atleast_2d(np.asarray(reals, dtype=np.float64))
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite value")
    raws = np.clip(np.rint(arr * fmt.scale), fmt.min_raw, fmt.max_raw).astype(np.int64)
    return [[QValue(int(r), fmt) for r in row] for row in raws]


def run_once(
    cfg: EngineConfig,
    spec: GenSpec | None = None,
    input_path: str | None = None,
    compare_oracle: bool = True,
    workers: int = 1,
) -> Report:
    """Run the pipeline on generated or loaded scores and build a Report.

    The oracle comparison runs the base-2 double-precision softmax on the
    quantized input values, so the error fields measure kernel fidelity
    rather than input quantization.
    """
    if input_path is not None:
        reals = load_matrix(input_path)
    elif spec is not None:
        reals = generate(spec)
    else:
        raise ValueError("either a generation spec or an input path is required")

    qm = quantize_matrix(reals, cfg.formats.input)
    outs, stats = softermax_matrix(qm, cfg, workers=workers)
    stats_dict = stats.asdict()

    errors = None
    if compare_oracle:
        qreals = np.array([[q.value for q in row] for row in qm])
        ref = softmax_ref(qreals, base=2.0)
        rep = compare(
            outs,
            ref,
            seed=spec.seed if spec else None,
            distribution=spec.distribution if spec else None,
        )
        errors = dataclasses.asdict(rep)

    return Report(SCHEMA_VERSION, _config_echo(cfg, spec, input_path, compare_oracle), stats_dict, errors)


def run_sweep(
    cfg: EngineConfig,
    lengths: list[int],
    base_spec: GenSpec,
    compare_oracle: bool = True,
    workers: int = 1,
) -> list[Report]:
    """One run_once per sequence length (cols swept, same rows/seed)."""
    if not lengths:
        raise ValueError("lengths must be non-empty")
    if any(n < 1 for n in lengths):
        raise ValueError("lengths must be >= 1")
    reports = []
    for n in lengths:
        spec = dataclasses.replace(base_spec, cols=n)
        reports.append(run_once(cfg, spec, compare_oracle=compare_oracle, workers=workers))
    return reports


_CSV_FIELDS = [
    "schema_version",
    "rows",
    "cols",
    "distribution",
    "seed",
    "lane_width",
    "mode",
    "renorm_events",
    "shift_ops",
    "mul_ops",
    "lut_reads",
    "add_ops",
    "max_abs_err",
    "mean_abs_err",
    "max_sum_dev",
    "argmax_match_rate",
]


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def reports_to_csv(reports: list[Report]) -> str:
    """CSV emission with the same numeric values as the JSON report."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_CSV_FIELDS)
    for rep in reports:
        row = {
            "schema_version": rep.schema_version,
            "rows": rep.stats["rows"],
            "cols": rep.stats["cols"],
            "distribution": rep.config["distribution"],
            "seed": rep.config["seed"],
            "lane_width": rep.config["lane_width"],
            "mode": rep.config["mode"],
            **{k: rep.stats[k] for k in ("renorm_events", "shift_ops", "mul_ops", "lut_reads", "add_ops")},
            **{
                k: (rep.errors[k] if rep.errors else None)
                for k in ("max_abs_err", "mean_abs_err", "max_sum_dev", "argmax_match_rate")
            },
        }
        w.writerow(_csv_cell(row[f]) for f in _CSV_FIELDS)
    return buf.getvalue()


def reports_to_json(reports: list[Report]) -> str:
    return json.dumps([r.to_dict() for r in reports], sort_keys=True, indent=2) + "\n"
