"""Result containers and deterministic CSV/JSON emission.

Output files are byte-stable given identical inputs: floats are rendered
with repr (shortest round-trip) and dict ordering is fixed.  Wall-clock and
timestamps live only in the run manifest.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .errors import ConfigurationError


@dataclass(frozen=True)
class Assertion:
    """One named check with its budget and the measured value."""

    name: str
    passed: bool
    tolerance: float
    measured: float
    detail: str = ""

    def row(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "tolerance": self.tolerance,
            "measured": self.measured,
            "detail": self.detail,
        }


@dataclass
class ExperimentResult:
    """Scalars, named series tables, and per-assertion outcomes of one run.

    Each series table is an ordered column mapping whose first column is the
    time/parameter axis.
    """

    scenario: str
    config_hash: str
    scalars: dict[str, float] = field(default_factory=dict)
    series: dict[str, dict[str, list]] = field(default_factory=dict)
    assertions: list[Assertion] = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    def check(self, name: str, passed: bool, tolerance: float, measured: float, detail: str = "") -> None:
        self.assertions.append(Assertion(name, bool(passed), float(tolerance), float(measured), detail))

    def add_series(self, table: str, columns: dict[str, list]) -> None:
        lengths = {len(v) for v in columns.values()}
        if len(lengths) > 1:
            raise ConfigurationError(f"ragged columns in series table {table!r}")
        self.series[table] = {k: list(v) for k, v in columns.items()}

    def as_tree(self) -> dict:
        return {
            "scenario": self.scenario,
            "config_hash": self.config_hash,
            "passed": self.passed,
            "scalars": dict(sorted(self.scalars.items())),
            "assertions": [a.row() for a in self.assertions],
            "series": self.series,
            "provenance": self.provenance,
        }


# Units for CSV headers; anything unlisted is dimensionless.
_UNITS = {
    "t": "time",
    "T": "time",
    "lambda": "1",
    "j": "1",
    "c": "1",
}


def _unit_for(name: str) -> str:
    if name in _UNITS:
        return _UNITS[name]
    if name.startswith(("t_", "time")):
        return "time"
    return "1"


def emit_results(result: ExperimentResult, fmt: str, outdir) -> list[Path]:
    """Write the result as CSV tables and/or a JSON tree; returns the paths."""
    if fmt not in ("csv", "json", "both"):
        raise ConfigurationError(f"unknown output format {fmt!r}")
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    if fmt in ("json", "both"):
        path = outdir / f"{result.scenario}.json"
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            json.dump(result.as_tree(), f, indent=1, sort_keys=False)
            f.write("\n")
        written.append(path)
    if fmt in ("csv", "both"):
        if not result.series:
            path = outdir / f"{result.scenario}.csv"
            with open(path, "w", encoding="utf-8", newline="") as f:
                csv.writer(f).writerow(["empty [1]"])
            written.append(path)
        for table, columns in result.series.items():
            path = outdir / f"{result.scenario}_{table}.csv"
            with open(path, "w", encoding="utf-8", newline="") as f:
                w = csv.writer(f)
                w.writerow([f"{name} [{_unit_for(name)}]" for name in columns])
                for row in zip(*columns.values()):
                    w.writerow([repr(x) if isinstance(x, float) else x for x in row])
            written.append(path)
    return written


@dataclass
class RunManifest:
    """Everything emitted by a CLI invocation, hash-linked to the config."""

    config_hash: str
    config_echo: str
    code_version: str
    passed: bool
    wall_clock_s: float
    artifacts: list[str]
    timestamp: str = ""

    def write(self, outdir) -> Path:
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        path = outdir / "manifest.json"
        doc = {
            "config_hash": self.config_hash,
            "config_echo": self.config_echo,
            "code_version": self.code_version,
            "passed": self.passed,
            "wall_clock_s": round(self.wall_clock_s, 3),
            "artifacts": sorted(self.artifacts),
            "timestamp": self.timestamp or datetime.now(timezone.utc).isoformat(),
        }
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            json.dump(doc, f, indent=1)
            f.write("\n")
        return path


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class Stopwatch:
    def __init__(self):
        self.t0 = time.perf_counter()

    def elapsed(self) -> float:
        return time.perf_counter() - self.t0
