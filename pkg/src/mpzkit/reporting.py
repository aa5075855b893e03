"""Experiment reports, key-value config files and thread settings."""

from __future__ import annotations

import csv
import io
import json
import os
import platform
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

THREADS_ENV = "MPZKIT_THREADS"


def thread_count(default: int = 1) -> int:
    """Worker count, overridden by the MPZKIT_THREADS environment variable."""
    raw = os.environ.get(THREADS_ENV)
    if raw is None or not raw.strip():
        return max(1, default)
    n = int(raw)
    if n < 1:
        raise ValueError(f"{THREADS_ENV} must be a positive integer")
    return n


def read_config(path: str | Path) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (v.strip() for v in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _plain(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    if hasattr(v, "item"):  # numpy scalars
        return v.item()
    return v


def _cell(v) -> str:
    v = _plain(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


@dataclass
class ExperimentReport:
    meta: dict = field(default_factory=dict)
    rows: list[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def columns(self) -> list[str]:
        cols: list[str] = []
        for r in self.rows:
            for k in r:
                if k not in cols:
                    cols.append(k)
        return cols

    def to_csv(self) -> str:
        buf = io.StringIO()
        cols = self.columns()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in self.rows:
            w.writerow([_cell(r[c]) if c in r else "" for c in cols])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {"meta": _plain(self.meta), "rows": _plain(self.rows), "summary": _plain(self.summary)}
        return json.dumps(doc, indent=2, sort_keys=False)

    def write(self, path: str | Path) -> Path:
        """CSV for a .csv suffix, JSON otherwise."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        text = self.to_csv() if path.suffix.lower() == ".csv" else self.to_json()
        path.write_text(text)
        return path


def environment_meta() -> dict:
    import numpy
    import scipy

    return {
        "python": platform.python_version(),
        "numpy": numpy.__version__,
        "scipy": scipy.__version__,
    }
