"""Summaries of finished runs: max/average evaluation totals and mean reward curves."""
from __future__ import annotations

import csv
import io
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .config import ConfigError, load_config
from .training import METRICS_HEADER, DataError


@dataclass(frozen=True)
class Summary:
    algorithm: str
    runs: int
    maximum: float
    average: float
    curve: tuple[tuple[int, float], ...]  # (step, mean total over runs)


def read_totals(run_dir) -> list[tuple[int, int]]:
    """(step, total) for each evaluation recorded in a run's metrics file."""
    path = Path(run_dir) / "metrics.csv"
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"missing metrics file {path}") from exc
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != METRICS_HEADER:
        raise DataError(f"{path}: bad or missing header")
    totals: dict[int, int] = {}
    try:
        for row in rows[1:]:
            if len(row) != len(METRICS_HEADER):
                raise ValueError(f"expected {len(METRICS_HEADER)} columns")
            totals[int(row[0])] = int(row[3])
    except ValueError as exc:
        raise DataError(f"{path}: corrupt row: {exc}") from exc
    if not totals:
        raise DataError(f"{path}: no evaluations recorded")
    return sorted(totals.items())


def summarize(totals_per_run: Sequence[Sequence[tuple[int, int]]], algorithm: str = "") -> Summary:
    """Mean curve over runs (per step), then its maximum and its average."""
    by_step = defaultdict(list)
    for totals in totals_per_run:
        for s, total in totals:
            by_step[s].append(total)
    curve = tuple((s, sum(v) / len(v)) for s, v in sorted(by_step.items()))
    values = [v for _, v in curve]
    return Summary(algorithm, len(totals_per_run), max(values), sum(values) / len(values), curve)


def report(run_dirs: Sequence) -> list[Summary]:
    if not run_dirs:
        raise DataError("no run directories given")
    groups: dict[str, list] = defaultdict(list)
    for d in run_dirs:
        try:
            algo = load_config(Path(d) / "config.txt").algorithm
        except (OSError, ConfigError) as exc:
            raise DataError(f"{d}: cannot read config: {exc}") from exc
        groups[algo].append(read_totals(d))
    return [summarize(runs, algo) for algo, runs in sorted(groups.items())]


def format_summaries(summaries: Sequence[Summary]) -> str:
    lines = [f"{'algorithm':<12} {'runs':>4} {'max':>8} {'average':>8}"]
    for s in summaries:
        lines.append(f"{s.algorithm:<12} {s.runs:>4} {s.maximum:>8.2f} {s.average:>8.2f}")
    return "\n".join(lines) + "\n"


def curve_csv(summaries: Sequence[Summary]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("algorithm", "step", "mean_total"))
    for s in summaries:
        for step, v in s.curve:
            w.writerow((s.algorithm, step, repr(v)))
    return buf.getvalue()
