"""Checkpointed series, the common currency of sums, fits and reports."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import UsageError

CSV_HEADER = ("x", "value", "main", "residual")


class Checkpoint(NamedTuple):
    x: float
    value: float
    main: float | None = None
    residual: float | None = None


@dataclass
class SumTrace:
    checkpoints: list[Checkpoint]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.checkpoints = [Checkpoint(*c) for c in self.checkpoints]
        xs = [c.x for c in self.checkpoints]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise UsageError("checkpoint x values must be strictly increasing")
        if not all(math.isfinite(c.value) for c in self.checkpoints):
            raise UsageError("checkpoint values must be finite")

    def __len__(self):
        return len(self.checkpoints)

    @property
    def xs(self) -> np.ndarray:
        return np.array([c.x for c in self.checkpoints], dtype=np.float64)

    @property
    def values(self) -> np.ndarray:
        return np.array([c.value for c in self.checkpoints], dtype=np.float64)

    @property
    def last(self) -> Checkpoint:
        return self.checkpoints[-1]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for c in self.checkpoints:
            w.writerow([fmt(c.x), fmt(c.value), fmt(c.main), fmt(c.residual)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, meta: dict | None = None) -> "SumTrace":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or tuple(h.strip() for h in rows[0]) != CSV_HEADER:
            raise UsageError(f"trace CSV must start with header {','.join(CSV_HEADER)}")
        cps = []
        for lineno, row in enumerate(rows[1:], start=2):
            if not row:
                continue
            if len(row) != 4:
                raise UsageError(f"line {lineno}: expected 4 fields, got {len(row)}")
            try:
                x, v = float(row[0]), float(row[1])
                main = float(row[2]) if row[2] else None
                res = float(row[3]) if row[3] else None
            except ValueError:
                raise UsageError(f"line {lineno}: non-numeric field") from None
            cps.append(Checkpoint(_intish(x), v, main, res))
        return cls(cps, dict(meta or {}))


def fmt(v: float | None) -> str:
    """12 significant digits; integers print without exponent when exact."""
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{v:.12g}"


def _intish(x: float):
    return int(x) if float(x).is_integer() and abs(x) < 2**53 else x


def geometric_grid(lo: float, hi: float, ratio: float) -> list[int]:
    """Integers round(lo * ratio**i) up to hi; ``hi`` itself closes the grid."""
    if lo < 1 or hi < lo or ratio <= 1:
        raise UsageError(f"bad grid {lo}:{hi}:{ratio}")
    out: list[int] = []
    i = 0
    while True:
        v = lo * ratio**i
        if v > hi * (1 + 1e-12):
            break
        n = int(round(v))
        if not out or n > out[-1]:
            out.append(n)
        i += 1
    if out[-1] < int(hi):
        out.append(int(hi))
    return out


def parse_grid(spec: str) -> list[int]:
    """``lo:hi:ratio`` with scientific notation allowed, e.g. ``1e4:1e8:3.162``."""
    try:
        lo, hi, ratio = (float(s) for s in spec.split(":"))
    except ValueError:
        raise UsageError(f"grid must look like lo:hi:ratio, got {spec!r}") from None
    return geometric_grid(lo, hi, ratio)
