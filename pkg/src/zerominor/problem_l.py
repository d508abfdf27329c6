"""Problem L: locate a zero minor of A and turn it into a k-zero kernel vector.

All index sets here (minor rows/columns, zero positions, selected rows)
are 1-based.  Every location leaving this module has been re-checked with
an exact determinant.
"""

from __future__ import annotations

import itertools
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .ff import FieldSpec
from .matfq import (
    KernelView,
    MatrixFq,
    PivotFailure,
    SchurState,
    extract_hprime,
    minor,
    rank,
    right_kernel,
    schur_step,
)

__all__ = [
    "MinorLocation",
    "ZeroVectorCertificate",
    "CascadeHit",
    "ExcessZerosError",
    "SoundnessError",
    "scan_entries",
    "ratio_scan_pair",
    "all_two_minors",
    "parallel_two_minors",
    "scan_zero_minor",
    "schur_cascade",
    "minor_to_certificate",
    "certificate_from_vector",
    "certificate_to_minor",
    "verify_certificate",
    "brute_force_search",
    "work_ratio",
    "cascade_area_ratio",
]


class ExcessZerosError(RuntimeError):
    """A kernel vector built from a zero minor does not have exactly k zeros."""


class SoundnessError(RuntimeError):
    """A search engine produced a location whose minor is non-zero."""


@dataclass(frozen=True)
class MinorLocation:
    alpha: tuple[int, ...]
    beta: tuple[int, ...]

    def __post_init__(self):
        a, b = tuple(sorted(self.alpha)), tuple(sorted(self.beta))
        if len(a) != len(b) or not a:
            raise ValueError(f"invalid minor location {self.alpha} x {self.beta}")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    @property
    def order(self) -> int:
        return len(self.alpha)

    def __str__(self) -> str:
        return f"{set(self.alpha)}x{set(self.beta)}"


@dataclass(frozen=True)
class ZeroVectorCertificate:
    """A kernel row-span vector with exactly k zeros.

    ``v`` is in raw kernel column order, which is the row order of the
    point matrix M, so ``v @ M = 0`` holds directly.  ``selected_rows`` are
    the (1-based) M-rows where v is non-zero.
    """

    v: tuple[int, ...]
    zero_positions: tuple[int, ...]
    selected_rows: tuple[int, ...]
    location: MinorLocation | None = None

    @property
    def k(self) -> int:
        return len(self.v) // 2


@dataclass(frozen=True)
class CascadeHit:
    location: MinorLocation
    stage: int          # number of reduced columns when the hit occurred
    source: str         # "entry", "2-minor" or "pivot"


def _verify(A: MatrixFq, loc: MinorLocation) -> MinorLocation:
    if minor(A, loc.alpha, loc.beta) != 0:
        raise SoundnessError(f"minor {loc} of A is non-zero")
    return loc


# ---------------------------------------------------------------------------
# entry and 2-minor scans
# ---------------------------------------------------------------------------


def scan_entries(A: MatrixFq) -> MinorLocation | None:
    """First zero entry in row-major order, as a 1x1 location."""
    for i, row in enumerate(A.rows):
        for j, a in enumerate(row):
            if a == 0:
                return MinorLocation((i + 1,), (j + 1,))
    return None


_INF = -1   # column where the second row is zero
_NULL = -2  # column where both rows are zero


def _inverse_row(f: FieldSpec, row: Sequence[int]) -> list[int]:
    inv = f.inv
    return [inv(b) if b else 0 for b in row]


def _column_keys(f: FieldSpec, row1: Sequence[int], inv2: Sequence[int]) -> list[int]:
    mul = f.mul
    return [mul(a, b) if b else (_INF if a else _NULL) for a, b in zip(row1, inv2)]


def _first_dependent_pair(keys: Sequence[int]) -> tuple[int, int] | None:
    """Lexicographically first (c1, c2), c1 < c2, whose columns are proportional."""
    n = len(keys)
    if n < 2:
        return None
    if _NULL not in keys and len(set(keys)) == n:
        return None
    next_same = [n] * n
    next_null = [n] * n
    last: dict[int, int] = {}
    null_after = n
    for c in range(n - 1, -1, -1):
        next_null[c] = null_after
        key = keys[c]
        if key == _NULL:
            null_after = c
        else:
            next_same[c] = last.get(key, n)
            last[key] = c
    for c1 in range(n - 1):
        c2 = c1 + 1 if keys[c1] == _NULL else min(next_same[c1], next_null[c1])
        if c2 < n:
            return (c1, c2)
    return None


def ratio_scan_pair(M: MatrixFq, r1: int, r2: int) -> tuple[int, int] | None:
    """Columns (c1, c2) of a zero 2-minor on rows r1, r2 (all 1-based), by hashing ratios.

    Column c is keyed by M[r1,c]/M[r2,c]; a zero denominator keys to infinity
    and a column zero in both rows pairs with every other column.  Equal
    keys are exactly the vanishing 2x2 determinants.  The lexicographically
    first pair is reported.
    """
    if r1 == r2:
        raise ValueError("ratio scan needs two distinct rows")
    f = M.field
    keys = _column_keys(f, M.rows[r1 - 1], _inverse_row(f, M.rows[r2 - 1]))
    hit = _first_dependent_pair(keys)
    return None if hit is None else (hit[0] + 1, hit[1] + 1)


def _pair_iter(n: int, start: int = 0, stop: int | None = None) -> Iterable[tuple[int, int]]:
    return itertools.islice(itertools.combinations(range(n), 2), start, stop)


def all_two_minors(M: MatrixFq, pair_range: tuple[int, int] | None = None,
                   stop: threading.Event | None = None) -> tuple[int, int, int, int] | None:
    """First zero 2-minor as (r1, r2, c1, c2), 1-based, scanning row pairs lexicographically.

    ``pair_range`` restricts the scan to a slice of the lexicographic pair
    enumeration; ``stop`` is polled between pairs.
    """
    n = M.nrows
    if n < 2:
        return None
    f = M.field
    inverses = [_inverse_row(f, r) for r in M.rows]
    start, end = pair_range if pair_range is not None else (0, None)
    rows = M.rows
    for r1, r2 in _pair_iter(n, start, end):
        if stop is not None and stop.is_set():
            return None
        hit = _first_dependent_pair(_column_keys(f, rows[r1], inverses[r2]))
        if hit is not None:
            return (r1 + 1, r2 + 1, hit[0] + 1, hit[1] + 1)
    return None


class _EitherEvent:
    """Set when the scan-local flag or the caller's flag is set."""

    def __init__(self, local: threading.Event, outer: threading.Event | None):
        self.local, self.outer = local, outer

    def is_set(self) -> bool:
        return self.local.is_set() or (self.outer is not None and self.outer.is_set())


def parallel_two_minors(M: MatrixFq, workers: int,
                        stop: threading.Event | None = None) -> tuple[int, int, int, int] | None:
    """all_two_minors over ``workers`` contiguous pair ranges sharing one stop flag.

    With more than one worker the reported minor is some zero 2-minor, not
    necessarily the lexicographically first.
    """
    total = M.nrows * (M.nrows - 1) // 2
    if workers <= 1 or total < 2 * workers:
        return all_two_minors(M, stop=stop)
    flag = _EitherEvent(threading.Event(), stop)
    bounds = [total * w // workers for w in range(workers + 1)]

    def run(w: int):
        hit = all_two_minors(M, (bounds[w], bounds[w + 1]), flag)
        if hit is not None:
            flag.local.set()
        return hit

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(run, range(workers)))
    hits = [h for h in results if h is not None]
    return min(hits) if hits else None


def scan_zero_minor(M: MatrixFq, two_minors: bool = True, workers: int = 1,
                    stop: threading.Event | None = None) -> MinorLocation | None:
    """Zero entries first, then (optionally) zero 2-minors."""
    loc = scan_entries(M)
    if loc is not None or not two_minors:
        return loc
    hit = parallel_two_minors(M, workers, stop) if workers > 1 else all_two_minors(M, stop=stop)
    if hit is None:
        return None
    r1, r2, c1, c2 = hit
    return MinorLocation((r1, r2), (c1, c2))


# ---------------------------------------------------------------------------
# Schur cascade
# ---------------------------------------------------------------------------


def schur_cascade(A: MatrixFq, depth: int | None = None, full_depth: bool = False,
                  workers: int = 1, stop: threading.Event | None = None) -> CascadeHit | None:
    """Scan A, then each successive Schur complement, for a zero entry or 2-minor.

    Stage k' reduces column k' and scans the complement H'.  A hit at H'
    rows I, columns J lifts to rows perm({1..k'} u I) and columns
    {1..k'} u J of A, where perm follows the recorded row swaps.  The
    default depth is floor(k/2); ``full_depth`` continues to k-2.
    """
    k = A.nrows
    if A.ncols != k:
        raise ValueError("schur_cascade expects a square matrix")
    if depth is None:
        depth = k - 2 if full_depth else k // 2
    depth = max(0, min(depth, k - 1))

    loc = scan_zero_minor(A, workers=workers, stop=stop)
    if loc is not None:
        return CascadeHit(_verify(A, loc), 0, "entry" if loc.order == 1 else "2-minor")
    state = SchurState.start(A)
    for kp in range(1, depth + 1):
        if stop is not None and stop.is_set():
            return None
        res = schur_step(state)
        if isinstance(res, PivotFailure):
            loc = MinorLocation(res.alpha, res.beta)
            return CascadeHit(_verify(A, loc), res.kprime, "pivot")
        H = extract_hprime(state)
        hloc = scan_zero_minor(H, workers=workers, stop=stop)
        if hloc is not None:
            lead = [state.perm[i] + 1 for i in range(kp)]
            alpha = lead + [state.perm[kp + i - 1] + 1 for i in hloc.alpha]
            beta = list(range(1, kp + 1)) + [kp + j for j in hloc.beta]
            loc = MinorLocation(tuple(alpha), tuple(beta))
            return CascadeHit(_verify(A, loc), kp, "entry" if hloc.order == 1 else "2-minor")
    return None


# ---------------------------------------------------------------------------
# minors <-> certificates
# ---------------------------------------------------------------------------


def certificate_from_vector(v: Sequence[int], location: MinorLocation | None = None) -> ZeroVectorCertificate:
    zeros = tuple(i + 1 for i, x in enumerate(v) if x == 0)
    support = tuple(i + 1 for i, x in enumerate(v) if x != 0)
    return ZeroVectorCertificate(tuple(v), zeros, support, location)


def minor_to_certificate(view: KernelView, loc: MinorLocation) -> ZeroVectorCertificate:
    """Row-reduce A[alpha|beta] to a vanishing combination and apply it to K.

    The combination is normalised so its first coefficient is 1.  The
    result has zeros at beta and at k+i for i outside alpha (normalised
    column order) and is returned in raw column order.
    """
    A, K, k = view.A, view.K, view.k
    f = A.field
    sub = MatrixFq(f, [[A.rows[i - 1][j - 1] for j in loc.beta] for i in loc.alpha])
    null = right_kernel(sub.transpose())
    if null.nrows == 0:
        raise ValueError(f"minor {loc} is non-zero")
    c = list(null.rows[0])
    lead = next(x for x in c if x)
    scale = f.inv(lead)
    c = [f.mul(scale, x) for x in c]
    coeffs = [0] * k
    for i, ci in zip(loc.alpha, c):
        coeffs[i - 1] = ci
    w = K.vecmul(coeffs)
    zeros = sum(1 for x in w if x == 0)
    if zeros != k:
        raise ExcessZerosError(f"combination for {loc} has {zeros} zeros, expected {k}")
    return certificate_from_vector(view.to_raw_order(w), loc)


def certificate_to_minor(view: KernelView, cert: ZeroVectorCertificate) -> MinorLocation:
    """Recover (alpha, beta): alpha = rows used in the combination, beta = zero columns of A."""
    k = view.k
    w = view.to_normalized_order(cert.v)
    coeffs = w[k:]
    if view.K.vecmul(coeffs) != list(w):
        raise ValueError("vector is not in the row span of the kernel")
    alpha = [i + 1 for i, c in enumerate(coeffs) if c]
    zero_cols = [j + 1 for j in range(k) if w[j] == 0]
    if not alpha or len(zero_cols) < len(alpha):
        raise ValueError("vector does not have k zeros")
    loc = MinorLocation(tuple(alpha), tuple(zero_cols[:len(alpha)]))
    return _verify(view.A, loc)


def verify_certificate(K_raw: MatrixFq, cert: ZeroVectorCertificate) -> bool:
    """v lies in the row span of K_raw and has exactly k zeros."""
    k = K_raw.nrows
    if len(cert.v) != K_raw.ncols or sum(1 for x in cert.v if x == 0) != k:
        return False
    return rank(MatrixFq(K_raw.field, list(K_raw.rows) + [cert.v])) == rank(K_raw)


# ---------------------------------------------------------------------------
# exhaustive search and the work ratio
# ---------------------------------------------------------------------------


def brute_force_search(A: MatrixFq, max_order: int | None = None) -> MinorLocation | None:
    """Every minor of order <= max_order, by order, then alpha, then beta lexicographically."""
    k = min(A.nrows, A.ncols)
    max_order = k if max_order is None else min(max_order, k)
    for r in range(1, max_order + 1):
        cols = list(itertools.combinations(range(1, A.ncols + 1), r))
        for alpha in itertools.combinations(range(1, A.nrows + 1), r):
            for beta in cols:
                if minor(A, alpha, beta) == 0:
                    return MinorLocation(alpha, beta)
    return None


def work_ratio(k: int) -> Fraction:
    """(7k^2 - 9k + 2) / (24k): cascade scan area over one full 2-minor scan, k even."""
    if k < 2 or k % 2:
        raise ValueError("work_ratio needs an even k >= 2; use cascade_area_ratio for odd k")
    return Fraction(7 * k * k - 9 * k + 2, 24 * k)


def cascade_area_ratio(k: int) -> Fraction:
    """Sum of the complement areas i^2, i = k - floor(k/2) .. k-1, divided by k^2 (any k >= 2)."""
    if k < 2:
        raise ValueError("k must be at least 2")
    return Fraction(sum(i * i for i in range(k - k // 2, k)), k * k)
