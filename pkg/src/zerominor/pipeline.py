"""The Las Vegas reduction of ECDLP to Problem L, end to end.

One round draws 2k distinct multipliers, builds the monomial matrix M of
the points n_i P (first s rows) and -n_j Q (last t rows), takes its left
kernel, normalises it to [A | I], searches A for a zero minor and turns the
hit into a k-zero kernel vector.  The non-zero positions of that vector
select k = 3n' points summing to O, which gives m.
"""

from __future__ import annotations

import math
import multiprocessing as mp
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .ec import Point
from .instances import CurveInstance
from .matfq import EarlySolve, MatrixFq, left_kernel, normalize_kernel
from .problem_l import (
    ZeroVectorCertificate,
    certificate_from_vector,
    minor_to_certificate,
    scan_entries,
    scan_zero_minor,
    schur_cascade,
)

__all__ = [
    "STRATEGIES",
    "LasVegasConfig",
    "MultiplierSet",
    "Solution",
    "NoHit",
    "Exhausted",
    "PointCollisionError",
    "RecoveryError",
    "default_n_prime",
    "monomial_basis",
    "build_row",
    "build_M",
    "draw_multipliers",
    "iterate_once",
    "recover_m",
    "solve",
    "worker_rng",
]

STRATEGIES = ("entries", "all2minors", "schur")


class PointCollisionError(ValueError):
    """Two rows of M would come from the same curve point."""


class RecoveryError(ValueError):
    """A certificate does not determine m (P-side only, degenerate, or wrong)."""


def default_n_prime(p: int) -> int:
    return max(2, math.ceil(math.log2(p)))


@dataclass(frozen=True)
class LasVegasConfig:
    n_prime: int
    s: int | None = None
    t: int | None = None
    max_iterations: int = 1000
    seed: int = 0
    strategy: str = "schur"
    workers: int = 1
    scan_workers: int = 1
    cascade_depth: int | None = None
    full_depth: bool = False
    max_resamples: int = 100

    def __post_init__(self):
        if self.n_prime < 1:
            raise ValueError("n' must be positive")
        k = 3 * self.n_prime
        s = k + 1 if self.s is None else self.s
        t = 2 * k - s if self.t is None else self.t
        if s < 1 or t < 1 or s == t or s + t != 2 * k:
            raise ValueError(f"need s != t, s + t = 2k = {2 * k}, got s={s}, t={t}")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "t", t)
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.workers < 1 or self.scan_workers < 1:
            raise ValueError("worker counts must be positive")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be non-negative")

    @property
    def k(self) -> int:
        return 3 * self.n_prime

    @property
    def l(self) -> int:
        return self.k


@dataclass(frozen=True)
class MultiplierSet:
    p_side: tuple[int, ...]
    q_side: tuple[int, ...]

    @property
    def all(self) -> tuple[int, ...]:
        return self.p_side + self.q_side

    def side_of_row(self, row: int) -> str:
        """'P' or 'Q' for a 1-based row of M."""
        return "P" if row <= len(self.p_side) else "Q"

    def multiplier_of_row(self, row: int) -> int:
        return self.all[row - 1]


@dataclass(frozen=True)
class Solution:
    m: int
    certificate: ZeroVectorCertificate
    iterations: int
    multipliers: MultiplierSet
    resamples: int = 0
    stage: int | None = None
    source: str | None = None


@dataclass(frozen=True)
class NoHit:
    resamples: int = 0
    reason: str = "no zero minor found"


@dataclass(frozen=True)
class Exhausted:
    iterations: int
    resamples: int = 0


# ---------------------------------------------------------------------------
# matrix construction
# ---------------------------------------------------------------------------


def monomial_basis(n_prime: int) -> tuple[tuple[int, int, int], ...]:
    """Exponent triples (u, v, w), u+v+w = n', graded-lex with x > y > z."""
    if n_prime < 1:
        raise ValueError("n' must be positive")
    return tuple((u, v, n_prime - u - v)
                 for u in range(n_prime, -1, -1)
                 for v in range(n_prime - u, -1, -1))


def build_row(field, pt: Point, basis: Sequence[tuple[int, int, int]]) -> list[int]:
    """x0^u y0^v z0^w for each basis monomial, with (x0 : y0 : 1)."""
    if pt.is_infinity:
        raise ValueError("the point at infinity never appears as a row")
    deg = max(u + v + w for u, v, w in basis)
    xp, yp = [1], [1]
    for _ in range(deg):
        xp.append(field.mul(xp[-1], pt.x))
        yp.append(field.mul(yp[-1], pt.y))
    return [field.mul(xp[u], yp[v]) for u, v, _ in basis]


def build_M(instance: CurveInstance, multipliers: MultiplierSet,
            basis: Sequence[tuple[int, int, int]]) -> MatrixFq:
    """Rows n_i P (P-side) then -n_j Q (Q-side); raises PointCollisionError on repeats."""
    curve = instance.curve
    points = [curve.scalar_mul(instance.P, n) for n in multipliers.p_side]
    points += [curve.scalar_mul(instance.Q, -n) for n in multipliers.q_side]
    seen: dict[Point, int] = {}
    for i, pt in enumerate(points):
        if pt.is_infinity:
            raise PointCollisionError(f"row {i + 1} is the point at infinity")
        if pt in seen:
            raise PointCollisionError(f"rows {seen[pt] + 1} and {i + 1} are the same point")
        seen[pt] = i
    f = instance.field
    return MatrixFq(f, [build_row(f, pt, basis) for pt in points], len(basis))


def draw_multipliers(p: int, s: int, t: int, rng: np.random.Generator) -> MultiplierSet:
    if p - 1 < s + t:
        raise ValueError(f"group order {p} too small for {s + t} distinct multipliers")
    chosen: list[int] = []
    seen: set[int] = set()
    while len(chosen) < s + t:
        n = int(rng.integers(1, p))
        if n not in seen:
            seen.add(n)
            chosen.append(n)
    return MultiplierSet(tuple(chosen[:s]), tuple(chosen[s:]))


def worker_rng(seed: int, stream: Sequence[int] = (), worker: int = 0) -> np.random.Generator:
    """Independent generator for one worker of one run, split from the master seed."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(stream) + (worker,)))


# ---------------------------------------------------------------------------
# one round
# ---------------------------------------------------------------------------


def recover_m(certificate: ZeroVectorCertificate, multipliers: MultiplierSet,
              instance: CurveInstance) -> int:
    """m = (sum of selected P-side n_i) / (sum of selected Q-side n_j) mod p, verified."""
    p = instance.order
    sp = sq = 0
    q_rows = 0
    for row in certificate.selected_rows:
        n = multipliers.multiplier_of_row(row)
        if multipliers.side_of_row(row) == "P":
            sp += n
        else:
            sq += n
            q_rows += 1
    if q_rows == 0:
        raise RecoveryError("certificate selects only P-side points")
    if sq % p == 0:
        raise RecoveryError("selected Q-side multipliers sum to 0 mod p")
    m = sp * pow(sq, -1, p) % p
    if not instance.check_solution(m):
        raise RecoveryError(f"candidate m = {m} fails m*P = Q")
    return m


def _search(A: MatrixFq, config: LasVegasConfig, stop=None):
    if config.strategy == "entries":
        loc = scan_entries(A)
        return None if loc is None else (loc, 0, "entry")
    if config.strategy == "all2minors":
        loc = scan_zero_minor(A, workers=config.scan_workers, stop=stop)
        return None if loc is None else (loc, 0, "entry" if loc.order == 1 else "2-minor")
    hit = schur_cascade(A, config.cascade_depth, config.full_depth, config.scan_workers, stop)
    return None if hit is None else (hit.location, hit.stage, hit.source)


def iterate_once(instance: CurveInstance, config: LasVegasConfig, rng: np.random.Generator,
                 basis: Sequence[tuple[int, int, int]] | None = None,
                 log: Callable[[dict], None] | None = None,
                 dump: Callable[[MatrixFq], None] | None = None,
                 stop=None) -> Solution | NoHit:
    """One Las Vegas round; colliding points or a non-generic kernel trigger a redraw."""
    k = config.k
    if basis is None:
        basis = monomial_basis(config.n_prime)
    record: dict = {}
    for resamples in range(config.max_resamples + 1):
        mults = draw_multipliers(instance.order, config.s, config.t, rng)
        try:
            M = build_M(instance, mults, basis)
        except PointCollisionError:
            continue
        K_raw = left_kernel(M)
        if K_raw.nrows != k:
            continue
        break
    else:
        return NoHit(config.max_resamples + 1, "resample budget exceeded")
    record.update(multipliers=list(mults.all), resamples=resamples)
    if dump is not None:
        dump(K_raw)

    view = normalize_kernel(K_raw, k)
    if isinstance(view, EarlySolve):
        cert = certificate_from_vector(view.vector)
        found = (cert, 0, "early")
    else:
        hit = _search(view.A, config, stop)
        if hit is None:
            record.update(status="nohit")
            if log:
                log(record)
            return NoHit(resamples)
        loc, stage, source = hit
        found = (minor_to_certificate(view, loc), stage, source)
    cert, stage, source = found
    record.update(stage=stage, source=source, selected=list(cert.selected_rows))
    if cert.location is not None:
        record.update(alpha=list(cert.location.alpha), beta=list(cert.location.beta))
    try:
        m = recover_m(cert, mults, instance)
    except RecoveryError as exc:
        record.update(status="rejected", reason=str(exc))
        if log:
            log(record)
        return NoHit(resamples, str(exc))
    record.update(status="solved", m=m)
    if log:
        log(record)
    return Solution(m, cert, 1, mults, resamples, stage, source)


# ---------------------------------------------------------------------------
# the loop
# ---------------------------------------------------------------------------


def _kernel_dumper(dump_dir: str | Path | None, worker: int):
    if dump_dir is None:
        return lambda it: None
    directory = Path(dump_dir) / "kernel"
    directory.mkdir(parents=True, exist_ok=True)

    def for_round(iteration: int):
        path = directory / f"kernel_w{worker}_r{iteration}.txt"
        return lambda K: path.write_text(K.dump())
    return for_round


def _run_rounds(instance: CurveInstance, config: LasVegasConfig, stream: tuple[int, ...],
                worker: int, budget: int, stop=None, dump_dir=None,
                basis=None) -> tuple[Solution | None, int, int, list[dict]]:
    rng = worker_rng(config.seed, stream, worker)
    records: list[dict] = []
    resamples = 0
    dumper = _kernel_dumper(dump_dir, worker)
    for it in range(1, budget + 1):
        if stop is not None and stop.is_set():
            return None, it - 1, resamples, records

        def log(rec, it=it):
            records.append({"worker": worker, "iteration": it, **rec})
        out = iterate_once(instance, config, rng, basis, log=log, dump=dumper(it))
        resamples += out.resamples
        if isinstance(out, Solution):
            return out, it, resamples, records
    return None, budget, resamples, records


_STOP = None


def _init_worker(event) -> None:
    global _STOP
    _STOP = event


def _worker_entry(args):
    instance, config, stream, worker, budget, dump_dir = args
    sol, rounds, resamples, records = _run_rounds(instance, config, stream, worker, budget,
                                                   _STOP, dump_dir)
    if sol is not None:
        _STOP.set()
    return worker, sol, rounds, resamples, records


def solve(instance: CurveInstance, config: LasVegasConfig, stream: Sequence[int] = (),
          transcript: Callable[[dict], None] | None = None, dump_dir: str | Path | None = None,
          basis: Sequence[tuple[int, int, int]] | None = None) -> Solution | Exhausted:
    """Repeat rounds until a verified m is found or the iteration budget runs out.

    With ``workers == 1`` the run is fully determined by (seed, stream).
    With more workers each runs its own rng stream in a separate process
    and the first verified solution stops the others; ``iterations`` then
    counts the rounds completed by all workers.
    """
    stream = tuple(stream)
    if config.workers == 1 or config.max_iterations == 0:
        sol, rounds, resamples, records = _run_rounds(
            instance, config, stream, 0, config.max_iterations, None, dump_dir, basis)
        if transcript:
            for rec in records:
                transcript(rec)
        if sol is None:
            return Exhausted(rounds, resamples)
        return Solution(sol.m, sol.certificate, rounds, sol.multipliers, resamples,
                        sol.stage, sol.source)

    budget = math.ceil(config.max_iterations / config.workers)
    event = mp.Event()
    jobs = [(instance, config, stream, w, budget, dump_dir) for w in range(config.workers)]
    with ProcessPoolExecutor(config.workers, initializer=_init_worker, initargs=(event,)) as pool:
        futures = [pool.submit(_worker_entry, job) for job in jobs]
        pending = set(futures)
        while pending:
            done, pending = wait(pending, return_when=FIRST_COMPLETED)
            if any(f.result()[1] is not None for f in done):
                event.set()
        results = sorted(f.result() for f in futures)
    total_rounds = sum(r[2] for r in results)
    total_resamples = sum(r[3] for r in results)
    if transcript:
        for r in results:
            for rec in r[4]:
                transcript(rec)
    winners = [r for r in results if r[1] is not None]
    if not winners:
        return Exhausted(total_rounds, total_resamples)
    sol = winners[0][1]
    if not instance.check_solution(sol.m):
        raise RecoveryError(f"worker returned unverified m = {sol.m}")
    return Solution(sol.m, sol.certificate, total_rounds, sol.multipliers, total_resamples,
                    sol.stage, sol.source)
