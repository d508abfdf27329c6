"""Exhaustive zero-minor census of small square matrices.

All minors of a k x k matrix are computed at once by a Laplace expansion
over subsets: the minor on rows alpha, columns beta expands along the
largest row of alpha, reusing the minors of order |alpha| - 1.  Each order
is one vectorised numpy step, so k = 12 (2.7 million minors) stays cheap.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dc_field
from typing import Iterable

import numpy as np

from ..ff import BinaryField, FieldSpec, PrimeField
from ..matfq import KernelView, MatrixFq, left_kernel, normalize_kernel
from ..instances import CurveInstance
from ..pipeline import PointCollisionError, build_M, draw_multipliers, monomial_basis

__all__ = ["MAX_CENSUS_K", "MinorCensus", "all_minors", "zero_minor_counts", "minor_census",
           "random_matrices", "pipeline_matrices"]

MAX_CENSUS_K = 12


@dataclass
class MinorCensus:
    k: int
    field: str
    samples: int = 0
    zero_counts: list[int] = dc_field(default_factory=list)  # index r-1 -> zero minors of order r
    with_zero_minor: int = 0
    smallest_witness: int | None = None
    first_order_histogram: dict[int, int] = dc_field(default_factory=dict)

    @property
    def fraction_with_zero_minor(self) -> float:
        return self.with_zero_minor / self.samples if self.samples else 0.0

    def bounds(self) -> list[int]:
        """C(k, r)^2 minors of order r per matrix, times the sample count."""
        return [math.comb(self.k, r) ** 2 * self.samples for r in range(1, self.k + 1)]

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "field": self.field,
            "samples": self.samples,
            "zero_counts": {r + 1: c for r, c in enumerate(self.zero_counts)},
            "fraction_with_zero_minor": self.fraction_with_zero_minor,
            "smallest_witness": self.smallest_witness,
            "first_order_histogram": dict(sorted(self.first_order_histogram.items())),
        }


class _Plan:
    """Index tables for the subset DP, shared by every matrix of size k."""

    def __init__(self, k: int):
        self.k = k
        self.combos = [[()]] + [list(itertools.combinations(range(k), r)) for r in range(1, k + 1)]
        index = [{c: i for i, c in enumerate(cs)} for cs in self.combos]
        self.top: list[np.ndarray] = [None]
        self.rest: list[np.ndarray] = [None]
        self.col: list[np.ndarray] = [None]
        self.drop: list[np.ndarray] = [None]
        for r in range(1, k + 1):
            cs = self.combos[r]
            self.top.append(np.array([c[-1] for c in cs], dtype=np.int64))
            self.rest.append(np.array([index[r - 1][c[:-1]] for c in cs], dtype=np.int64))
            self.col.append(np.array(cs, dtype=np.int64))
            self.drop.append(np.array([[index[r - 1][c[:p] + c[p + 1:]] for p in range(r)]
                                       for c in cs], dtype=np.int64))


_PLANS: dict[int, _Plan] = {}


def _plan(k: int) -> _Plan:
    if k not in _PLANS:
        _PLANS[k] = _Plan(k)
    return _PLANS[k]


def all_minors(A: MatrixFq) -> list[np.ndarray]:
    """``out[r-1][a, b]`` is the minor on the a-th and b-th r-subsets (lexicographic)."""
    k = A.nrows
    if A.ncols != k:
        raise ValueError("census expects square matrices")
    if k > MAX_CENSUS_K:
        raise ValueError(f"exhaustive enumeration is limited to k <= {MAX_CENSUS_K}")
    f = A.field
    plan = _plan(k)
    a = np.array(A.rows, dtype=np.int64).reshape(k, k)
    if isinstance(f, PrimeField):
        if f.p >= 1 << 31:
            raise ValueError("census needs p < 2^31")
        q = f.p
        mul = lambda x, y: (x * y) % q
    elif isinstance(f, BinaryField):
        mul = f.vmul
    else:
        raise TypeError(f"unsupported field {f!r}")

    out = []
    prev = np.ones((1, 1), dtype=np.int64)
    for r in range(1, k + 1):
        top, rest, col, drop = plan.top[r], plan.rest[r], plan.col[r], plan.drop[r]
        cur = np.zeros((len(top), len(col)), dtype=np.int64)
        for p in range(r):
            term = mul(a[top[:, None], col[None, :, p]], prev[rest[:, None], drop[None, :, p]])
            if isinstance(f, BinaryField):
                cur ^= term
            elif (r - 1 + p) % 2:
                cur = (cur - term) % q
            else:
                cur = (cur + term) % q
        out.append(cur)
        prev = cur
    return out


def zero_minor_counts(A: MatrixFq) -> list[int]:
    return [int((m == 0).sum()) for m in all_minors(A)]


def minor_census(matrices: Iterable[MatrixFq], field: FieldSpec, k: int) -> MinorCensus:
    census = MinorCensus(k, field.describe(), zero_counts=[0] * k)
    for A in matrices:
        counts = zero_minor_counts(A)
        census.samples += 1
        census.zero_counts = [c + d for c, d in zip(census.zero_counts, counts)]
        first = next((r + 1 for r, c in enumerate(counts) if c), None)
        if first is not None:
            census.with_zero_minor += 1
            census.first_order_histogram[first] = census.first_order_histogram.get(first, 0) + 1
            if census.smallest_witness is None or first < census.smallest_witness:
                census.smallest_witness = first
    return census


def random_matrices(field: FieldSpec, k: int, samples: int, rng: np.random.Generator):
    for _ in range(samples):
        yield MatrixFq(field, [[field.random(rng) for _ in range(k)] for _ in range(k)], k)


def pipeline_matrices(instance: CurveInstance, n_prime: int, samples: int,
                      rng: np.random.Generator, max_attempts: int | None = None):
    """The A blocks of real pipeline rounds (default split s = k+1, t = k-1)."""
    k = 3 * n_prime
    basis = monomial_basis(n_prime)
    produced = 0
    attempts = 0
    limit = max_attempts if max_attempts is not None else 20 * samples + 100
    while produced < samples and attempts < limit:
        attempts += 1
        mults = draw_multipliers(instance.order, k + 1, k - 1, rng)
        try:
            M = build_M(instance, mults, basis)
        except PointCollisionError:
            continue
        K = left_kernel(M)
        if K.nrows != k:
            continue
        view = normalize_kernel(K, k)
        if not isinstance(view, KernelView):
            continue
        produced += 1
        yield view.A
