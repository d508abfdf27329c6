"""Repeated solves of fixed instances, recorded as CSV.

Every trial of every strategy on one instance uses the rng stream
(seed, instance index, trial), so strategies are compared on identical
multiplier sequences.
"""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass
from typing import Sequence

import numpy as np

from ..instances import CurveInstance
from ..pipeline import Exhausted, LasVegasConfig, solve

__all__ = ["CSV_FIELDS", "ExperimentRecord", "run_trial", "run_experiment", "summarize",
           "log_linear_fit", "format_csv"]

CSV_FIELDS = ("field", "kind", "log2p", "nprime", "k", "strategy", "trial", "iterations",
              "resamples", "wall_ms")


@dataclass(frozen=True)
class ExperimentRecord:
    field: str
    kind: str
    log2p: float
    nprime: int
    k: int
    strategy: str
    trial: int
    iterations: int
    resamples: int
    wall_ms: float


def run_trial(instance: CurveInstance, config: LasVegasConfig, stream: tuple[int, ...],
              trial: int, timing: bool = True) -> ExperimentRecord | None:
    """One solve; None when the iteration budget runs out."""
    t0 = time.perf_counter()
    out = solve(instance, config, stream=stream)
    wall = round((time.perf_counter() - t0) * 1000, 3) if timing else 0
    if isinstance(out, Exhausted):
        return None
    if not instance.check_solution(out.m):
        raise AssertionError("solver emitted an unverified m")
    f = instance.field
    return ExperimentRecord(f.describe(), f.kind, round(math.log2(instance.order), 4),
                            config.n_prime, config.k, config.strategy, trial,
                            out.iterations, out.resamples, wall)


def _trial_job(args):
    return run_trial(*args)


def run_experiment(instances: Sequence[CurveInstance], strategies: Sequence[str], trials: int,
                   n_prime: int, seed: int = 0, max_iterations: int = 100_000,
                   workers: int = 1, timing: bool = True,
                   **config_kw) -> tuple[list[ExperimentRecord], int]:
    """All trials for every (instance, strategy); returns (records, exhausted count).

    With ``workers > 1`` trials run in a process pool, but each trial is
    still a single-worker solve, so the records do not depend on the
    worker count.  Records come back in (instance, strategy, trial) order.
    """
    jobs = []
    for idx, inst in enumerate(instances):
        for strategy in strategies:
            config = LasVegasConfig(n_prime=n_prime, strategy=strategy, seed=seed,
                                    max_iterations=max_iterations, **config_kw)
            for t in range(trials):
                jobs.append((inst, config, (idx, t), t, timing))
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_trial_job, jobs))
    else:
        results = [_trial_job(j) for j in jobs]
    records = [r for r in results if r is not None]
    return records, len(results) - len(records)


def summarize(records: Sequence[ExperimentRecord]) -> list[tuple]:
    """Mean iterations, resamples and wall time per (field, strategy), as CSV-shaped rows."""
    groups: dict[tuple, list[ExperimentRecord]] = {}
    for r in records:
        groups.setdefault((r.field, r.kind, r.log2p, r.nprime, r.k, r.strategy), []).append(r)
    rows = []
    for key, rs in groups.items():
        rows.append(key + ("mean",
                           round(float(np.mean([r.iterations for r in rs])), 4),
                           round(float(np.mean([r.resamples for r in rs])), 4),
                           round(float(np.mean([r.wall_ms for r in rs])), 3)))
    return rows


def log_linear_fit(records: Sequence[ExperimentRecord]) -> dict[str, tuple[float, float]]:
    """Per strategy, (slope, intercept) of log2(mean iterations) against log2 p."""
    fits = {}
    by_strategy: dict[str, dict[float, list[int]]] = {}
    for r in records:
        by_strategy.setdefault(r.strategy, {}).setdefault(r.log2p, []).append(r.iterations)
    for strategy, by_size in by_strategy.items():
        if len(by_size) < 2:
            continue
        xs = sorted(by_size)
        ys = [math.log2(np.mean(by_size[x])) for x in xs]
        slope, intercept = np.polyfit(xs, ys, 1)
        fits[strategy] = (float(slope), float(intercept))
    return fits


def format_csv(records: Sequence[ExperimentRecord], summary: bool = True) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for r in records:
        writer.writerow(astuple(r))
    if summary:
        for row in summarize(records):
            writer.writerow(row)
    return buf.getvalue()
