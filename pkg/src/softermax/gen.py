"""Score-matrix generation and matrix file I/O for the harness.

Two input file formats are supported:

  * CSV: one row per line, decimal reals separated by commas.
  * binary "SMX1": magic ``SMX1``, then rows and cols as 32-bit little-endian
    unsigned ints, then row-major 32-bit little-endian IEEE-754 floats.
"""

from __future__ import annotations

import re
import struct
from dataclasses import dataclass

import numpy as np

from . import rng

_DIST_RE = re.compile(r"^\s*(normal|uniform|attention)\s*\(([^)]*)\)\s*$")

SMX_MAGIC = b"SMX1"


@dataclass(frozen=True)
class GenSpec:
    """Deterministic description of a generated score matrix."""

    distribution: str
    rows: int
    cols: int
    seed: int

    def __post_init__(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise ValueError("rows and cols must be >= 1")
        if not 0 <= self.seed < (1 << 64):
            raise ValueError("seed must fit in 64 bits")
        parse_distribution(self.distribution)  # fail fast on bad strings


def parse_distribution(spec: str) -> tuple:
    """Parse 'normal(mu,sigma)' | 'uniform(lo,hi)' | 'attention(d_k)'."""
    m = _DIST_RE.match(spec)
    if not m:
        raise ValueError(f"invalid distribution {spec!r}")
    name, argstr = m.group(1), m.group(2)
    args = [a.strip() for a in argstr.split(",")] if argstr.strip() else []
    try:
        if name == "normal":
            mu, sigma = (float(a) for a in args)
            if sigma < 0:
                raise ValueError
            return ("normal", mu, sigma)
        if name == "uniform":
            lo, hi = (float(a) for a in args)
            if not lo < hi:
                raise ValueError
            return ("uniform", lo, hi)
        d_k = int(args[0]) if len(args) == 1 else None
        if d_k is None or d_k < 1:
            raise ValueError
        return ("attention", d_k)
    except (ValueError, TypeError):
        raise ValueError(f"invalid distribution {spec!r}") from None


def generate(spec: GenSpec) -> np.ndarray:
    """Deterministic rows x cols float64 matrix from the seeded splitmix64
    stream (see rng module for the pinned algorithm)."""
    kind = parse_distribution(spec.distribution)
    n = spec.rows * spec.cols
    if kind[0] == "normal":
        _, mu, sigma = kind
        return rng.normals(spec.seed, n, mu, sigma).reshape(spec.rows, spec.cols)
    if kind[0] == "uniform":
        _, lo, hi = kind
        return rng.uniforms(spec.seed, n, lo, hi).reshape(spec.rows, spec.cols)
    _, d_k = kind
    # attention scores: Q @ K.T / sqrt(d_k) from unit-normal Q (rows x d_k)
    # and K (cols x d_k); Q is drawn first, K continues the same stream.
    q = rng.normals(spec.seed, spec.rows * d_k).reshape(spec.rows, d_k)
    k = rng.normals(spec.seed, spec.cols * d_k, offset=2 * spec.rows * d_k).reshape(
        spec.cols, d_k
    )
    return (q @ k.T) / np.sqrt(float(d_k))


def load_matrix(path: str) -> np.ndarray:
    """Load a matrix from CSV or SMX1, sniffing the binary magic."""
    with open(path, "rb") as f:
        head = f.read(4)
    if head == SMX_MAGIC:
        return load_matrix_smx(path)
    return load_matrix_csv(path)


def load_matrix_csv(path: str) -> np.ndarray:
    rows: list[list[float]] = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            try:
                row = [float(tok) for tok in line.split(",")]
            except ValueError:
                raise ValueError(f"malformed matrix: bad number on line {lineno}") from None
            rows.append(row)
    if not rows:
        raise ValueError("malformed matrix: no data rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError("malformed matrix: ragged rows")
    arr = np.array(rows, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError("malformed matrix: non-finite value")
    return arr


def load_matrix_smx(path: str) -> np.ndarray:
    with open(path, "rb") as f:
        blob = f.read()
    if blob[:4] != SMX_MAGIC or len(blob) < 12:
        raise ValueError("malformed matrix: bad SMX1 header")
    rows, cols = struct.unpack_from("<II", blob, 4)
    expected = 12 + rows * cols * 4
    if rows < 1 or cols < 1 or len(blob) != expected:
        raise ValueError("malformed matrix: SMX1 size mismatch")
    data = np.frombuffer(blob, dtype="<f4", offset=12).astype(np.float64)
    if not np.all(np.isfinite(data)):
        raise ValueError("malformed matrix: non-finite value")
    return data.reshape(rows, cols)


def write_matrix_csv(path: str, m: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for row in np.asarray(m, dtype=np.float64):
            f.write(",".join(repr(float(v)) for v in row) + "\n")


def write_matrix_smx(path: str, m: np.ndarray) -> None:
    arr = np.asarray(m, dtype="<f4")
    if arr.ndim != 2:
        raise ValueError("matrix must be 2-D")
    with open(path, "wb") as f:
        f.write(SMX_MAGIC)
        f.write(struct.pack("<II", arr.shape[0], arr.shape[1]))
        f.write(arr.tobytes(order="C"))
