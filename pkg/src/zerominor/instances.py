"""ECDLP instances: validation, the line-oriented instance file, and generation.

File format (one record per line, ``#`` starts a comment)::

    field prime <p>            |  field binary <m> <0x-irreducible>
    curve <a1> <a2> <a3> <a4> <a6>
    order <p>
    P <x> <y>
    Q <x> <y>
    m <decimal>                   (optional)
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from sympy import isprime, nextprime

from .ec import INFINITY, Curve, Point, count_points
from .ff import BinaryField, FieldError, FieldSpec, PrimeField, default_irreducible

__all__ = [
    "CurveInstance",
    "InstanceError",
    "InstanceFormatError",
    "GenerationError",
    "parse_instance",
    "load_instance",
    "format_instance",
    "save_instance",
    "gen_instance",
    "MAX_GEN_BITS",
]

MAX_GEN_BITS = 24


class InstanceError(ValueError):
    """An instance violates one of its invariants; ``record`` names the culprit line."""

    def __init__(self, message: str, record: str | None = None):
        super().__init__(message)
        self.record = record


class InstanceFormatError(InstanceError):
    """Malformed instance file; carries the offending line number."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class GenerationError(RuntimeError):
    """No suitable curve found within the retry budget."""


@dataclass(frozen=True)
class CurveInstance:
    curve: Curve
    P: Point
    Q: Point
    order: int
    known_m: int | None = None

    @property
    def field(self) -> FieldSpec:
        return self.curve.field

    def validate(self) -> None:
        """Raise InstanceError unless every instance invariant holds."""
        c = self.curve
        if not isprime(self.order):
            raise InstanceError(f"order {self.order} is not prime", "order")
        for name, pt in (("P", self.P), ("Q", self.Q)):
            if pt.is_infinity:
                raise InstanceError(f"{name} is the point at infinity", name)
            if not c.validate_point(pt):
                raise InstanceError(f"{name} = {pt} is not on the curve", name)
            if not c.scalar_mul(pt, self.order).is_infinity:
                raise InstanceError(f"order * {name} != O", "order")
        if self.known_m is not None:
            if not 1 <= self.known_m < self.order:
                raise InstanceError(f"m = {self.known_m} outside [1, {self.order})", "m")
            if c.scalar_mul(self.P, self.known_m) != self.Q:
                raise InstanceError("m * P != Q", "m")

    def check_solution(self, m: int) -> bool:
        return 1 <= m < self.order and self.curve.scalar_mul(self.P, m) == self.Q


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------


def format_instance(inst: CurveInstance) -> str:
    f = inst.field
    enc = f.encode
    if isinstance(f, PrimeField):
        lines = [f"field prime {f.p}"]
    else:
        lines = [f"field binary {f.m} {f.poly:#x}"]
    lines.append("curve " + " ".join(enc(a) for a in inst.curve.coefficients))
    lines.append(f"order {inst.order}")
    lines.append(f"P {enc(inst.P.x)} {enc(inst.P.y)}")
    lines.append(f"Q {enc(inst.Q.x)} {enc(inst.Q.y)}")
    if inst.known_m is not None:
        lines.append(f"m {inst.known_m}")
    return "\n".join(lines) + "\n"


def save_instance(inst: CurveInstance, path: str | Path) -> None:
    Path(path).write_text(format_instance(inst))


def _decimal(lineno: int, token: str, what: str) -> int:
    if not token.isdigit():
        raise InstanceFormatError(lineno, f"{what} must be a decimal integer, got {token!r}")
    return int(token)


def parse_instance(text: str, validate: bool = True) -> CurveInstance:
    records: dict[str, tuple[int, list[str]]] = {}
    order = ("field", "curve", "order", "P", "Q", "m")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tag, *args = line.split()
        if tag not in order:
            raise InstanceFormatError(lineno, f"unknown record {tag!r}")
        if tag in records:
            raise InstanceFormatError(lineno, f"duplicate {tag!r} record")
        records[tag] = (lineno, args)
    for tag in order[:-1]:
        if tag not in records:
            raise InstanceFormatError(len(text.splitlines()) + 1, f"missing {tag!r} record")

    lineno, args = records["field"]
    try:
        if args[:1] == ["prime"] and len(args) == 2:
            field: FieldSpec = PrimeField(_decimal(lineno, args[1], "modulus"))
        elif args[:1] == ["binary"] and len(args) == 3:
            if not args[2].startswith("0x"):
                raise InstanceFormatError(lineno, "irreducible polynomial must be 0x-hex")
            field = BinaryField(_decimal(lineno, args[1], "degree"), int(args[2], 16))
        else:
            raise InstanceFormatError(lineno, "expected 'field prime <p>' or 'field binary <m> <0xpoly>'")
    except (FieldError, ValueError) as exc:
        if isinstance(exc, InstanceFormatError):
            raise
        raise InstanceFormatError(lineno, str(exc)) from exc

    def elements(tag: str, count: int) -> list[int]:
        ln, vals = records[tag]
        if len(vals) != count:
            raise InstanceFormatError(ln, f"{tag!r} expects {count} values, got {len(vals)}")
        try:
            return [field.decode(v) for v in vals]
        except ValueError as exc:
            raise InstanceFormatError(ln, str(exc)) from exc

    coeffs = elements("curve", 5)
    try:
        curve = Curve(field, *coeffs)
    except ValueError as exc:
        raise InstanceFormatError(records["curve"][0], str(exc)) from exc
    ln, vals = records["order"]
    if len(vals) != 1:
        raise InstanceFormatError(ln, "'order' expects one value")
    group_order = _decimal(ln, vals[0], "order")
    P = Point(*elements("P", 2))
    Q = Point(*elements("Q", 2))
    known_m = None
    if "m" in records:
        ln, vals = records["m"]
        if len(vals) != 1:
            raise InstanceFormatError(ln, "'m' expects one value")
        known_m = _decimal(ln, vals[0], "m")
    inst = CurveInstance(curve, P, Q, group_order, known_m)
    if validate:
        try:
            inst.validate()
        except InstanceError as exc:
            raise InstanceFormatError(records[exc.record or "order"][0], str(exc)) from exc
    return inst


def load_instance(path: str | Path, validate: bool = True) -> CurveInstance:
    return parse_instance(Path(path).read_text(), validate=validate)


# ---------------------------------------------------------------------------
# generation
# ---------------------------------------------------------------------------


def _random_prime(bits: int, rng: np.random.Generator) -> int:
    lo, hi = 1 << (bits - 1), 1 << bits
    while True:
        p = int(nextprime(int(rng.integers(lo, hi)) - 1))
        if p < hi and p > 3:
            return p


def gen_instance(bits: int, kind: str, rng: np.random.Generator, with_solution: bool = True,
                 field: FieldSpec | None = None, max_curves: int = 2000) -> CurveInstance:
    """Random ECDLP instance over a field of about ``bits`` bits.

    Prime fields get a curve y^2 = x^3 + a4 x + a6 of prime order.  Binary
    curves y^2 + xy = x^3 + a2 x^2 + a6 always have even order, so P
    generates the subgroup of prime order #E/2.  Point counting is by
    exhaustive enumeration, hence ``bits <= 24``.
    """
    if field is None:
        if not 4 <= bits <= MAX_GEN_BITS:
            raise ValueError(f"field bits must lie in [4, {MAX_GEN_BITS}], got {bits}")
        if kind == "prime":
            field = PrimeField(_random_prime(bits, rng))
        elif kind == "binary":
            field = BinaryField(bits, default_irreducible(bits))
        else:
            raise ValueError(f"unknown field kind {kind!r}")
    if field.order > 1 << MAX_GEN_BITS:
        raise ValueError("brute-force point counting is limited to 2^24 elements")

    for _ in range(max_curves):
        if isinstance(field, PrimeField):
            a4, a6 = field.random(rng), field.random(rng)
            try:
                curve = Curve(field, 0, 0, 0, a4, a6)
            except ValueError:
                continue
            cofactor = 1
        else:
            # Tr(a2) = 1 makes #E = 2 (mod 4), leaving room for a prime cofactor-2 subgroup
            a2 = field.random(rng)
            if field.trace(a2) == 0:
                continue
            a6 = field.random_nonzero(rng)
            curve = Curve(field, 1, a2, 0, 0, a6)
            cofactor = 2
        n = count_points(curve)
        if n % cofactor or not isprime(n // cofactor) or n // cofactor < 5:
            continue
        p = n // cofactor
        P = INFINITY
        while P.is_infinity:
            P = curve.scalar_mul(curve.random_point(rng), cofactor)
        m = int(rng.integers(1, p))
        Q = curve.scalar_mul(P, m)
        inst = CurveInstance(curve, P, Q, p, m)
        inst.validate()
        if not with_solution:
            inst = CurveInstance(curve, P, Q, p, None)
        return inst
    raise GenerationError(f"no prime-order curve over {field!r} in {max_curves} attempts")
