"""Dense matrices over a finite field.

Entries are stored as canonical integer representatives (row-major tuples)
and interpreted through the matrix's :class:`~zerominor.ff.FieldSpec`.
Element access ``M[i, j]`` is 0-based; index sets naming minors follow the
usual mathematical convention and are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Iterable, Sequence

from .ff import FieldElement, FieldSpec

__all__ = [
    "MatrixFq",
    "RankDeficientError",
    "KernelView",
    "EarlySolve",
    "rref",
    "rank",
    "left_kernel",
    "right_kernel",
    "normalize_kernel",
    "det",
    "minor",
    "SchurState",
    "PivotFailure",
    "schur_step",
    "extract_hprime",
    "replay_history",
]


class RankDeficientError(ValueError):
    """A kernel basis has fewer independent rows than required."""


class MatrixFq:
    """Immutable dense matrix over a finite field."""

    __slots__ = ("field", "nrows", "ncols", "rows")

    def __init__(self, field: FieldSpec, rows: Iterable[Sequence[int]], ncols: int | None = None):
        data = tuple(tuple(int(v) for v in r) for r in rows)
        if ncols is None:
            if not data:
                raise ValueError("empty matrix needs an explicit column count")
            ncols = len(data[0])
        for r in data:
            if len(r) != ncols:
                raise ValueError("ragged rows")
            for v in r:
                if not field.is_canonical(v):
                    raise ValueError(f"entry {v} is not a canonical element of {field!r}")
        self.field = field
        self.nrows = len(data)
        self.ncols = ncols
        self.rows = data

    @classmethod
    def from_elements(cls, rows: Sequence[Sequence[FieldElement]]) -> MatrixFq:
        field = rows[0][0].field
        for r in rows:
            for e in r:
                if e.field != field:
                    raise ValueError("entries from different fields")
        return cls(field, [[e.value for e in r] for r in rows])

    @classmethod
    def from_ints(cls, field: FieldSpec, rows: Iterable[Sequence[int]]) -> MatrixFq:
        """Build from arbitrary integers, reducing each with ``field.from_int``."""
        return cls(field, [[field.from_int(v) for v in r] for r in rows])

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> MatrixFq:
        return cls(field, [[1 if i == j else 0 for j in range(n)] for i in range(n)], n)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.rows[i][j]

    def element(self, i: int, j: int) -> FieldElement:
        return FieldElement(self.rows[i][j], self.field)

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, MatrixFq) and self.field == other.field
                and self.shape == other.shape and self.rows == other.rows)

    def __hash__(self) -> int:
        return hash((self.field, self.rows))

    def __repr__(self) -> str:
        return f"MatrixFq({self.field!r}, {self.nrows}x{self.ncols})"

    def to_lists(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def transpose(self) -> MatrixFq:
        return MatrixFq(self.field, zip(*self.rows) if self.nrows else [], self.nrows)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> MatrixFq:
        """0-based row/column selection."""
        return MatrixFq(self.field, [[self.rows[i][j] for j in cols] for i in rows], len(cols))

    def column_block(self, start: int, stop: int) -> MatrixFq:
        return MatrixFq(self.field, [r[start:stop] for r in self.rows], stop - start)

    def permute_columns(self, order: Sequence[int]) -> MatrixFq:
        return MatrixFq(self.field, [[r[j] for j in order] for r in self.rows], len(order))

    def __matmul__(self, other: MatrixFq) -> MatrixFq:
        if self.field != other.field or self.ncols != other.nrows:
            raise ValueError("incompatible operands")
        f = self.field
        cols = list(zip(*other.rows))
        return MatrixFq(f, [[_dot(f, r, c) for c in cols] for r in self.rows], other.ncols)

    def vecmul(self, v: Sequence[int]) -> list[int]:
        """Row vector times matrix: v @ M."""
        if len(v) != self.nrows:
            raise ValueError("length mismatch")
        f = self.field
        out = [0] * self.ncols
        for coeff, row in zip(v, self.rows):
            if coeff:
                for j, a in enumerate(row):
                    if a:
                        out[j] = f.add(out[j], f.mul(coeff, a))
        return out

    def dump(self) -> str:
        """One row per line, entries in the instance-file element encoding."""
        enc = self.field.encode
        return "\n".join(" ".join(enc(v) for v in r) for r in self.rows) + "\n"

    @classmethod
    def parse_dump(cls, field: FieldSpec, text: str) -> MatrixFq:
        return cls(field, [[field.decode(t) for t in line.split()]
                           for line in text.splitlines() if line.strip()])


def _dot(f: FieldSpec, a: Sequence[int], b: Sequence[int]) -> int:
    s = 0
    for x, y in zip(a, b):
        if x and y:
            s = f.add(s, f.mul(x, y))
    return s


def _axpy_row(f: FieldSpec, target: list[int], c: int, source: Sequence[int], start: int = 0) -> None:
    """target += c * source (in place, from column ``start``)."""
    add, mul = f.add, f.mul
    for j in range(start, len(target)):
        s = source[j]
        if s:
            target[j] = add(target[j], mul(c, s))


# ---------------------------------------------------------------------------
# elimination
# ---------------------------------------------------------------------------


def rref(M: MatrixFq) -> tuple[list[list[int]], list[int]]:
    """Reduced row-echelon form and pivot columns (first non-zero pivot scanning down)."""
    f = M.field
    a = M.to_lists()
    pivots: list[int] = []
    r = 0
    for c in range(M.ncols):
        if r == M.nrows:
            break
        piv = next((i for i in range(r, M.nrows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = f.inv(a[r][c])
        a[r] = [f.mul(inv, v) for v in a[r]]
        for i in range(M.nrows):
            if i != r and a[i][c]:
                _axpy_row(f, a[i], f.neg(a[i][c]), a[r], c)
        pivots.append(c)
        r += 1
    return a, pivots


def rank(M: MatrixFq) -> int:
    return len(rref(M)[1])


def right_kernel(M: MatrixFq) -> MatrixFq:
    """Basis (as rows) of {x : M x = 0}; each basis row has a 1 at its free column."""
    f = M.field
    red, pivots = rref(M)
    free = [c for c in range(M.ncols) if c not in set(pivots)]
    basis = []
    for fc in free:
        v = [0] * M.ncols
        v[fc] = 1
        for r, pc in enumerate(pivots):
            v[pc] = f.neg(red[r][fc])
        basis.append(v)
    return MatrixFq(f, basis, M.ncols)


def left_kernel(M: MatrixFq) -> MatrixFq:
    """Basis (as rows) of {v : v M = 0}; row count is nrows - rank(M)."""
    return right_kernel(M.transpose())


@dataclass(frozen=True)
class KernelView:
    """A k x 2k kernel normalised to [A | I].

    ``col_map[j]`` is the column of the raw kernel (equivalently the row of
    the matrix it was computed from, 0-based) that ended up at normalised
    column ``j``.
    """

    A: MatrixFq
    K: MatrixFq
    col_map: tuple[int, ...]
    raw: MatrixFq

    @property
    def k(self) -> int:
        return self.A.nrows

    def to_raw_order(self, v: Sequence[int]) -> list[int]:
        out = [0] * len(v)
        for j, c in enumerate(self.col_map):
            out[c] = v[j]
        return out

    def to_normalized_order(self, v: Sequence[int]) -> list[int]:
        return [v[c] for c in self.col_map]


@dataclass(frozen=True)
class EarlySolve:
    """The right block was singular: ``vector`` (raw column order) vanishes on it."""

    vector: tuple[int, ...]


def normalize_kernel(K_raw: MatrixFq, k: int | None = None) -> KernelView | EarlySolve:
    """Row-reduce a k x 2k kernel basis so its right half becomes the identity.

    Rows are processed in order; row i takes as pivot the first unused
    right-half column where it is non-zero, and that column is moved to
    position k+i.  A row whose right half vanishes after elimination is
    returned as :class:`EarlySolve`.
    """
    f = K_raw.field
    if k is None:
        k = K_raw.nrows
    if K_raw.nrows != k or K_raw.ncols != 2 * k:
        raise ValueError(f"expected a {k}x{2 * k} kernel, got {K_raw.nrows}x{K_raw.ncols}")
    work = K_raw.to_lists()
    used: list[int] = []
    for i in range(k):
        row = work[i]
        piv = next((c for c in range(k, 2 * k) if c not in used and row[c]), None)
        if piv is None:
            if not any(row):
                raise RankDeficientError(f"kernel basis has rank < {k}")
            return EarlySolve(tuple(row))
        inv = f.inv(row[piv])
        if inv != 1:
            work[i] = row = [f.mul(inv, v) for v in row]
        for r in range(k):
            if r != i and work[r][piv]:
                _axpy_row(f, work[r], f.neg(work[r][piv]), row)
        used.append(piv)
    col_map = tuple(range(k)) + tuple(used)
    K = MatrixFq(f, [[r[c] for c in col_map] for r in work], 2 * k)
    return KernelView(K.column_block(0, k), K, col_map, K_raw)


def det(M: MatrixFq) -> int:
    """Determinant by Gaussian elimination (raw representative)."""
    if M.nrows != M.ncols:
        raise ValueError("determinant of a non-square matrix")
    return _det_rows(M.field, M.to_lists())


def _det_rows(f: FieldSpec, a: list[list[int]]) -> int:
    n = len(a)
    d = 1
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c]), None)
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            d = f.neg(d)
        p = a[c][c]
        d = f.mul(d, p)
        inv = f.inv(p)
        for i in range(c + 1, n):
            if a[i][c]:
                _axpy_row(f, a[i], f.neg(f.mul(a[i][c], inv)), a[c], c)
    return d


def _check_index_set(idx: Sequence[int], bound: int, what: str) -> list[int]:
    out = sorted(idx)
    if len(set(out)) != len(out):
        raise ValueError(f"repeated {what} index in {idx}")
    if out and (out[0] < 1 or out[-1] > bound):
        raise IndexError(f"{what} indices {idx} outside 1..{bound}")
    return out


def minor(M: MatrixFq, alpha: Sequence[int], beta: Sequence[int]) -> int:
    """det(M[alpha | beta]) for 1-based index sets of equal, positive size."""
    if len(alpha) != len(beta) or not alpha:
        raise ValueError(f"|alpha| = {len(alpha)} and |beta| = {len(beta)} must be equal and positive")
    rows = _check_index_set(alpha, M.nrows, "row")
    cols = _check_index_set(beta, M.ncols, "column")
    return _det_rows(M.field, [[M.rows[i - 1][j - 1] for j in cols] for i in rows])


# ---------------------------------------------------------------------------
# Schur complements by tracked column reduction
# ---------------------------------------------------------------------------


@dataclass
class SchurState:
    """Column-by-column triangularisation of a square matrix.

    After ``kprime`` steps the leading ``kprime`` columns of ``work`` are upper
    triangular with a non-zero diagonal.  ``perm[r]`` is the original row
    (0-based) currently at position r, and ``history`` lists every elementary
    operation as ``("swap", i, j)`` or ``("axpy", target, source, c)``
    meaning row[target] += c * row[source].
    """

    field: FieldSpec
    work: list[list[int]]
    kprime: int = 0
    perm: list[int] = dc_field(default_factory=list)
    history: list[tuple] = dc_field(default_factory=list)
    swaps: int = 0

    @classmethod
    def start(cls, A: MatrixFq) -> SchurState:
        if A.nrows != A.ncols:
            raise ValueError("Schur reduction needs a square matrix")
        return cls(A.field, A.to_lists(), 0, list(range(A.nrows)))

    @property
    def size(self) -> int:
        return len(self.work)

    def position_of(self, original_row: int) -> int:
        return self.perm.index(original_row)

    def pivots(self) -> list[int]:
        return [self.work[i][i] for i in range(self.kprime)]

    def matrix(self) -> MatrixFq:
        return MatrixFq(self.field, self.work, self.size)


@dataclass(frozen=True)
class PivotFailure:
    """Column ``kprime+1`` vanished from row ``kprime+1`` down.

    The leading block formed by the current first kprime+1 rows and the
    first kprime+1 columns is singular; ``alpha``/``beta`` name it in the
    original matrix (1-based).
    """

    kprime: int
    alpha: tuple[int, ...]
    beta: tuple[int, ...]


def schur_step(state: SchurState) -> SchurState | PivotFailure:
    """Reduce column kprime+1; returns the (mutated) state or a PivotFailure."""
    f = state.field
    j = state.kprime
    n = state.size
    if j >= n:
        raise ValueError("matrix already fully reduced")
    a = state.work
    piv = next((i for i in range(j, n) if a[i][j]), None)
    if piv is None:
        rows = tuple(sorted(state.perm[i] + 1 for i in range(j + 1)))
        return PivotFailure(j, rows, tuple(range(1, j + 2)))
    if piv != j:
        a[j], a[piv] = a[piv], a[j]
        state.perm[j], state.perm[piv] = state.perm[piv], state.perm[j]
        state.history.append(("swap", j, piv))
        state.swaps += 1
    inv = f.inv(a[j][j])
    for i in range(j + 1, n):
        if a[i][j]:
            c = f.neg(f.mul(a[i][j], inv))
            _axpy_row(f, a[i], c, a[j], j)
            state.history.append(("axpy", i, j, c))
    state.kprime = j + 1
    return state


def extract_hprime(state: SchurState) -> MatrixFq:
    """The (k - k') x (k - k') lower-right block of the working matrix."""
    j = state.kprime
    if j == 0:
        raise ValueError("no column has been reduced yet")
    return MatrixFq(state.field, [r[j:] for r in state.work[j:]], state.size - j)


def replay_history(A: MatrixFq, history: Sequence[tuple]) -> MatrixFq:
    """Apply a recorded operation history to A."""
    f = A.field
    a = A.to_lists()
    for op in history:
        if op[0] == "swap":
            _, i, j = op
            a[i], a[j] = a[j], a[i]
        else:
            _, t, s, c = op
            _axpy_row(f, a[t], c, a[s])
    return MatrixFq(f, a, A.ncols)
