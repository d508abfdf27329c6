"""Exact arithmetic in prime fields F_p and binary fields F_{2^m}.

Elements are handled in two layers.  The algorithms (elimination, curve
arithmetic, minor scans) work on canonical integer representatives and call
the raw methods of a field object (``add``, ``mul``, ``inv``, ...).  The
:class:`FieldElement` wrapper gives the same arithmetic with Python operators
and refuses to mix elements of different fields.

Binary-field elements are bitmasks: bit ``i`` is the coefficient of ``x^i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Union

import numpy as np
from sympy import isprime, primefactors
from sympy.ntheory.residue_ntheory import sqrt_mod

__all__ = [
    "FieldError",
    "FieldMismatchError",
    "NotInvertibleError",
    "FieldSpec",
    "PrimeField",
    "BinaryField",
    "FieldElement",
    "gf2_is_irreducible",
    "default_irreducible",
    "parse_field",
]

# scalar arithmetic uses log/antilog tables up to this extension degree
TABLE_MAX_DEGREE = 20


class FieldError(ValueError):
    """Invalid field description."""


class FieldMismatchError(ValueError):
    """Operands belong to different fields."""


class NotInvertibleError(ZeroDivisionError):
    """Inversion of zero."""


# ---------------------------------------------------------------------------
# GF(2)[x] helpers on int bitmasks
# ---------------------------------------------------------------------------


def _clmul(a: int, b: int) -> int:
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def _pmod(a: int, f: int) -> int:
    df = f.bit_length() - 1
    while a and a.bit_length() - 1 >= df:
        a ^= f << (a.bit_length() - 1 - df)
    return a


def _pgcd(a: int, b: int) -> int:
    while b:
        a, b = b, _pmod(a, b)
    return a


def _pmulmod(a: int, b: int, f: int) -> int:
    return _pmod(_clmul(a, b), f)


def gf2_is_irreducible(poly: int) -> bool:
    """Rabin's irreducibility test for a polynomial over F_2 given as a bitmask."""
    m = poly.bit_length() - 1
    if m < 1:
        return False
    if m == 1:
        return True
    if not poly & 1:
        return False

    def x_pow_2k(k: int) -> int:
        r = 2  # the polynomial x
        for _ in range(k):
            r = _pmulmod(r, r, poly)
        return r

    if x_pow_2k(m) != _pmod(2, poly):
        return False
    for r in primefactors(m):
        h = x_pow_2k(m // r) ^ 2
        if _pgcd(poly, _pmod(h, poly)) != 1:
            return False
    return True


def default_irreducible(m: int) -> int:
    """Lowest-weight irreducible polynomial of degree m (trinomial, else pentanomial)."""
    if m == 1:
        return 0b11
    top = (1 << m) | 1
    for a in range(1, m):
        cand = top | (1 << a)
        if gf2_is_irreducible(cand):
            return cand
    for a in range(3, m):
        for b in range(2, a):
            for c in range(1, b):
                cand = top | (1 << a) | (1 << b) | (1 << c)
                if gf2_is_irreducible(cand):
                    return cand
    raise FieldError(f"no irreducible polynomial of degree {m} with weight <= 5")


# ---------------------------------------------------------------------------
# Field specs
# ---------------------------------------------------------------------------


class FieldSpec:
    """Base class of the two field kinds.

    Subclasses implement the raw operations on integer representatives.
    Two specs are equal iff they describe the same field with the same
    representation.
    """

    kind: str
    order: int
    characteristic: int

    def key(self) -> tuple:
        raise NotImplementedError

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FieldSpec) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    # raw operations ------------------------------------------------------
    def add(self, a: int, b: int) -> int:
        raise NotImplementedError

    def sub(self, a: int, b: int) -> int:
        raise NotImplementedError

    def neg(self, a: int) -> int:
        raise NotImplementedError

    def mul(self, a: int, b: int) -> int:
        raise NotImplementedError

    def inv(self, a: int) -> int:
        raise NotImplementedError

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        result = 1
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    def from_int(self, n: int) -> int:
        raise NotImplementedError

    def scalar(self, n: int) -> int:
        """The field image of the integer n (n times the unit)."""
        raise NotImplementedError

    def random(self, rng: np.random.Generator) -> int:
        return int(rng.integers(0, self.order))

    def random_nonzero(self, rng: np.random.Generator) -> int:
        return int(rng.integers(1, self.order))

    def sqrt(self, a: int) -> int | None:
        """Some square root of a, or None when a is a non-square."""
        raise NotImplementedError

    def is_canonical(self, a: int) -> bool:
        return 0 <= a < self.order

    # text encoding -------------------------------------------------------
    def encode(self, a: int) -> str:
        raise NotImplementedError

    def decode(self, text: str) -> int:
        raise NotImplementedError

    def describe(self) -> str:
        """Compact descriptor, e.g. ``73`` or ``16:0x1002b``."""
        raise NotImplementedError

    # element wrappers ----------------------------------------------------
    def __call__(self, n: int) -> FieldElement:
        return FieldElement(self.from_int(n), self)

    def element(self, rep: int) -> FieldElement:
        if not self.is_canonical(rep):
            raise ValueError(f"{rep} is not a canonical representative of {self}")
        return FieldElement(rep, self)

    @property
    def zero(self) -> FieldElement:
        return FieldElement(0, self)

    @property
    def one(self) -> FieldElement:
        return FieldElement(1, self)


class PrimeField(FieldSpec):
    kind = "prime"

    def __init__(self, p: int):
        p = int(p)
        if p < 3 or not isprime(p):
            raise FieldError(f"prime field modulus must be an odd prime, got {p}")
        self.p = p
        self.order = p
        self.characteristic = p

    def key(self) -> tuple:
        return ("prime", self.p)

    def __repr__(self) -> str:
        return f"PrimeField({self.p})"

    def add(self, a, b):
        s = a + b
        return s - self.p if s >= self.p else s

    def sub(self, a, b):
        s = a - b
        return s + self.p if s < 0 else s

    def neg(self, a):
        return self.p - a if a else 0

    def mul(self, a, b):
        return a * b % self.p

    def inv(self, a):
        if a == 0:
            raise NotInvertibleError("zero has no inverse")
        return pow(a, -1, self.p)

    def pow(self, a, e):
        return pow(a, e, self.p)

    def from_int(self, n):
        return int(n) % self.p

    def scalar(self, n):
        return int(n) % self.p

    def sqrt(self, a):
        if a == 0:
            return 0
        if pow(a, (self.p - 1) // 2, self.p) != 1:
            return None
        return int(sqrt_mod(a, self.p))

    def encode(self, a):
        return str(a)

    def decode(self, text):
        if not text.isdigit():
            raise ValueError(f"expected a decimal field element, got {text!r}")
        value = int(text)
        if value >= self.p:
            raise ValueError(f"{value} is not reduced modulo {self.p}")
        return value

    def describe(self):
        return str(self.p)

    # vectorised helpers (int64, requires p < 2^31) --------------------------
    def legendre_table(self) -> np.ndarray:
        """Boolean array: is_square[a] for every a in F_p (zero counts as square)."""
        xs = np.arange(self.p, dtype=np.int64)
        table = np.zeros(self.p, dtype=bool)
        table[(xs * xs) % self.p] = True
        return table


class BinaryField(FieldSpec):
    kind = "binary"

    def __init__(self, m: int, poly: int):
        m, poly = int(m), int(poly)
        if m < 1:
            raise FieldError("extension degree must be positive")
        if poly.bit_length() - 1 != m:
            raise FieldError(f"polynomial {poly:#x} does not have degree {m}")
        if not gf2_is_irreducible(poly):
            raise FieldError(f"polynomial {poly:#x} is reducible over F_2")
        self.m = m
        self.poly = poly
        self.order = 1 << m
        self.characteristic = 2
        self._mask = self.order - 1
        self._tables = None
        if m <= TABLE_MAX_DEGREE:
            self.mul = self._mul_table
            self.inv = self._inv_table

    def __reduce__(self):
        # rebuild tables in the receiving process instead of pickling them
        return (BinaryField, (self.m, self.poly))

    @classmethod
    def with_default_poly(cls, m: int) -> BinaryField:
        return cls(m, default_irreducible(m))

    def key(self) -> tuple:
        return ("binary", self.m, self.poly)

    def __repr__(self) -> str:
        return f"BinaryField({self.m}, {self.poly:#x})"

    def add(self, a, b):
        return a ^ b

    sub = add

    def neg(self, a):
        return a

    def mul(self, a, b):
        r = 0
        m, poly = self.m, self.poly
        while b:
            if b & 1:
                r ^= a
            b >>= 1
            a <<= 1
            if a >> m:
                a ^= poly
        return r

    def inv(self, a):
        if a == 0:
            raise NotInvertibleError("zero has no inverse")
        return self.pow(a, self.order - 2)

    def _mul_table(self, a, b):
        if not a or not b:
            return 0
        exp, log = self.tables
        return exp[log[a] + log[b]]

    def _inv_table(self, a):
        if a == 0:
            raise NotInvertibleError("zero has no inverse")
        exp, log = self.tables
        return exp[self.order - 1 - log[a]]

    def from_int(self, n):
        return int(n) & self._mask

    def scalar(self, n):
        return int(n) & 1

    def sqrt(self, a):
        # Frobenius is bijective: sqrt(a) = a^(2^(m-1))
        for _ in range(self.m - 1):
            a = self.mul(a, a)
        return a

    def trace(self, a: int) -> int:
        return bin(a & self.trace_mask).count("1") & 1

    @cached_property
    def trace_mask(self) -> int:
        mask = 0
        for i in range(self.m):
            t, s = 0, 1 << i
            for _ in range(self.m):
                t ^= s
                s = self._mul_bitwise(s, s)
            if t & 1:
                mask |= 1 << i
        return mask

    def _mul_bitwise(self, a, b):
        return BinaryField.mul(self, a, b)

    @cached_property
    def _artin_schreier(self):
        # rows of the GF(2)-linear map z -> z^2 + z, reduced for solving
        images = []
        for i in range(self.m):
            b = 1 << i
            images.append(self._mul_bitwise(b, b) ^ b)
        return images

    def solve_quadratic(self, c: int) -> int | None:
        """A root z of z^2 + z = c, or None when Tr(c) = 1."""
        if self.trace(c):
            return None
        m = self.m
        # augmented system: columns are basis images, unknown bits of z
        rows = []
        for bit in range(m):
            coeffs = 0
            for i, img in enumerate(self._artin_schreier):
                if img >> bit & 1:
                    coeffs |= 1 << i
            rows.append([coeffs, c >> bit & 1])
        z, pivots, r = 0, [], 0
        for col in range(m):
            piv = next((i for i in range(r, m) if rows[i][0] >> col & 1), None)
            if piv is None:
                continue
            rows[r], rows[piv] = rows[piv], rows[r]
            for i in range(m):
                if i != r and rows[i][0] >> col & 1:
                    rows[i][0] ^= rows[r][0]
                    rows[i][1] ^= rows[r][1]
            pivots.append(col)
            r += 1
        for i in range(r, m):
            if rows[i][1]:
                return None
        for i, col in enumerate(pivots):
            if rows[i][1]:
                z |= 1 << col
        return z

    def encode(self, a):
        return f"{a:#x}"

    def decode(self, text):
        if not text.startswith("0x"):
            raise ValueError(f"expected a 0x-prefixed binary field element, got {text!r}")
        value = int(text, 16)
        if value >> self.m:
            raise ValueError(f"{text} has degree >= {self.m}")
        return value

    def describe(self):
        return f"{self.m}:{self.poly:#x}"

    # log tables ----------------------------------------------------------
    def _pow_bitwise(self, a: int, e: int) -> int:
        result = 1
        while e:
            if e & 1:
                result = self._mul_bitwise(result, a)
            a = self._mul_bitwise(a, a)
            e >>= 1
        return result

    @cached_property
    def generator(self) -> int:
        """A primitive element (generator of the multiplicative group)."""
        n = self.order - 1
        factors = primefactors(n) if n > 1 else []
        for g in range(2, self.order):
            if all(self._pow_bitwise(g, n // r) != 1 for r in factors):
                return g
        return 1

    def _mul_const_vec(self, values: np.ndarray, c: int) -> np.ndarray:
        out = np.zeros_like(values)
        shifted = c
        for i in range(self.m):
            out ^= np.where((values >> i) & 1, shifted, 0).astype(values.dtype)
            shifted = self._mul_bitwise(shifted, 2)
        return out

    @cached_property
    def _np_tables(self) -> tuple[np.ndarray, np.ndarray]:
        n = self.order - 1
        exp = np.zeros(max(2 * n, 1), dtype=np.int64)
        exp[0] = 1
        filled = 1
        while filled < n:
            take = min(filled, n - filled)
            exp[filled:filled + take] = self._mul_const_vec(
                exp[:take], self._pow_bitwise(self.generator, filled))
            filled += take
        exp[n:2 * n] = exp[:n]
        log = np.full(self.order, -1, dtype=np.int64)
        log[exp[:n]] = np.arange(n, dtype=np.int64)
        return exp, log

    def np_tables(self) -> tuple[np.ndarray, np.ndarray]:
        """numpy (exp, log) tables; exp has length 2(q-1) so log sums need no reduction."""
        return self._np_tables

    @property
    def tables(self):
        if self._tables is None:
            exp, log = self._np_tables
            self._tables = (exp.tolist(), log.tolist())
        return self._tables

    def vmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Elementwise product of two arrays of representatives."""
        exp, log = self.np_tables()
        prod = exp[log[a] + log[b]]
        return np.where((a == 0) | (b == 0), 0, prod)

    def vinv(self, a: np.ndarray) -> np.ndarray:
        exp, log = self.np_tables()
        return np.where(a == 0, 0, exp[(self.order - 1 - log[a]) % (self.order - 1)])

    def vtrace(self, a: np.ndarray) -> np.ndarray:
        v = a & self.trace_mask
        parity = np.zeros_like(v)
        for i in range(self.m):
            parity ^= (v >> i) & 1
        return parity


# ---------------------------------------------------------------------------
# Elements
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class FieldElement:
    value: int
    field: FieldSpec

    def _other(self, other: Union[FieldElement, int]) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatchError(f"{self.field!r} vs {other.field!r}")
            return other.value
        if isinstance(other, int):
            return self.field.scalar(other)
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        return FieldElement(self.field.add(self.value, o), self.field)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return FieldElement(self.field.sub(self.value, o), self.field)

    def __rsub__(self, other):
        o = self._other(other)
        return FieldElement(self.field.sub(o, self.value), self.field)

    def __neg__(self):
        return FieldElement(self.field.neg(self.value), self.field)

    def __mul__(self, other):
        o = self._other(other)
        return FieldElement(self.field.mul(self.value, o), self.field)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        return FieldElement(self.field.div(self.value, o), self.field)

    def __rtruediv__(self, other):
        o = self._other(other)
        return FieldElement(self.field.div(o, self.value), self.field)

    def __pow__(self, e: int):
        return FieldElement(self.field.pow(self.value, e), self.field)

    def inverse(self) -> FieldElement:
        return FieldElement(self.field.inv(self.value), self.field)

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatchError(f"{self.field!r} vs {other.field!r}")
            return self.value == other.value
        if isinstance(other, int):
            return self.value == self.field.scalar(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.field))

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.field.encode(self.value)} in {self.field!r}"

    def __str__(self):
        return self.field.encode(self.value)


def parse_field(text: str) -> FieldSpec:
    """Parse a field descriptor.

    Accepted forms: ``73``, ``prime:73``, ``binary:8``, ``binary:8:0x11b``,
    ``8:0x11b`` and ``2^8``.  Binary fields without a polynomial use
    :func:`default_irreducible`.
    """
    parts = text.strip().split(":")
    if parts[0] == "prime" and len(parts) == 2:
        return PrimeField(int(parts[1]))
    if parts[0] == "binary" and len(parts) in (2, 3):
        m = int(parts[1])
        poly = int(parts[2], 16) if len(parts) == 3 else default_irreducible(m)
        return BinaryField(m, poly)
    if len(parts) == 2:
        return BinaryField(int(parts[0]), int(parts[1], 16))
    if parts[0].startswith("2^"):
        m = int(parts[0][2:])
        return BinaryField(m, default_irreducible(m))
    if len(parts) == 1 and parts[0].isdigit():
        return PrimeField(int(parts[0]))
    raise FieldError(f"cannot parse field descriptor {text!r}")
