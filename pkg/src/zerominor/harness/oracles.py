"""Independent brute-force oracles used to cross-check the fast paths."""

from __future__ import annotations

import itertools
import math

import numpy as np

from ..ec import INFINITY, Point
from ..ff import BinaryField, PrimeField
from ..instances import CurveInstance
from ..matfq import MatrixFq

__all__ = ["bsgs_dlog", "rowspan_vectors", "max_zeros_in_rowspan", "vectors_with_min_zeros"]

BSGS_MAX_ORDER = 1 << 30


def bsgs_dlog(instance: CurveInstance) -> int:
    """The m in [1, p) with m*P = Q, by baby-step/giant-step over ceil(sqrt(p)) steps."""
    p = instance.order
    if p > BSGS_MAX_ORDER:
        raise ValueError("baby-step/giant-step oracle is limited to p <= 2^30")
    curve, P, Q = instance.curve, instance.P, instance.Q
    n = math.isqrt(p - 1) + 1
    baby: dict[Point, int] = {}
    R = INFINITY
    for j in range(n):
        baby.setdefault(R, j)
        R = curve.add(R, P, check=False)
    stride = curve.neg(curve.scalar_mul(P, n))
    G = Q
    for i in range(n + 1):
        j = baby.get(G)
        if j is not None:
            m = (i * n + j) % p
            if m and curve.scalar_mul(P, m) == Q:
                return m
        G = curve.add(G, stride, check=False)
    raise ValueError("Q is not a multiple of P")


def _coefficient_tuples(q: int, k: int, projective: bool) -> np.ndarray:
    if not projective:
        return np.array(list(itertools.product(range(q), repeat=k))[1:], dtype=np.int64)
    # one representative per line: the first non-zero coefficient is 1
    blocks = []
    for lead in range(k):
        width = k - lead - 1
        tail = np.array(list(itertools.product(range(q), repeat=width)), dtype=np.int64)
        tail = tail.reshape(q ** width, width)
        head = np.zeros((len(tail), lead + 1), dtype=np.int64)
        head[:, lead] = 1
        blocks.append(np.hstack([head, tail]))
    return np.vstack(blocks)


def rowspan_vectors(K: MatrixFq, projective: bool = False) -> np.ndarray:
    """Non-zero vectors of the row span of K, one per row.

    All q^k - 1 of them, or with ``projective`` one per scalar class
    ((q^k - 1)/(q - 1) rows), which has the same zero patterns.  Only
    suitable for tiny fields and few rows.
    """
    f = K.field
    k = K.nrows
    count = (f.order ** k - 1) // (f.order - 1 if projective else 1)
    if count > 1 << 22:
        raise ValueError("row span too large to enumerate")
    coeffs = _coefficient_tuples(f.order, k, projective)
    rows = np.array(K.rows, dtype=np.int64)
    if isinstance(f, PrimeField):
        return (coeffs @ rows) % f.p
    if isinstance(f, BinaryField):
        out = np.zeros((coeffs.shape[0], K.ncols), dtype=np.int64)
        for i in range(k):
            out ^= f.vmul(coeffs[:, i:i + 1], np.broadcast_to(rows[i], out.shape))
        return out
    raise TypeError(f"unsupported field {f!r}")


def max_zeros_in_rowspan(K: MatrixFq) -> int:
    """Largest number of zero coordinates among non-zero row-span vectors."""
    return int((rowspan_vectors(K, projective=True) == 0).sum(axis=1).max())


def vectors_with_min_zeros(K: MatrixFq, at_least: int) -> np.ndarray:
    """Projective representatives of row-span vectors with at least ``at_least`` zeros."""
    vecs = rowspan_vectors(K, projective=True)
    return vecs[(vecs == 0).sum(axis=1) >= at_least]
