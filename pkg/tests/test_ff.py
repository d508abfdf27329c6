import numpy as np
import pytest
from hypothesis import given, strategies as st

from zerominor.ff import (
    BinaryField,
    FieldMismatchError,
    FieldError,
    NotInvertibleError,
    PrimeField,
    default_irreducible,
    gf2_is_irreducible,
    parse_field,
)


def slow_gf2_mul(a, b, poly):
    """Schoolbook shift-and-add with reduction after every shift."""
    m = poly.bit_length() - 1
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a >> m & 1:
            a ^= poly
    return r


def trial_division_irreducible(poly):
    deg = poly.bit_length() - 1
    for d in range(2, 1 << (deg // 2 + 1)):
        if d.bit_length() - 1 < 1:
            continue
        # polynomial remainder of poly by d
        r = poly
        while r.bit_length() >= d.bit_length():
            r ^= d << (r.bit_length() - d.bit_length())
        if r == 0:
            return False
    return True


FIELDS = [PrimeField(73), PrimeField(1009), PrimeField(2**31 - 1),
          BinaryField(8, 0x11B), BinaryField(17, default_irreducible(17)),
          BinaryField(31, default_irreducible(31))]


def elements(f):
    return st.integers(0, f.order - 1)


# -- published and hand-checked values ----------------------------------

def test_two_by_two_determinant_vanishes_mod_73(f73):
    a = f73.sub(f73.mul(70, 13), f73.mul(18, 10))
    assert a == 0
    assert (70 * 13 - 18 * 10) == 10 * 73


def test_inverse_of_13_mod_73_matches_exhaustive_scan(f73):
    oracle = next(x for x in range(73) if 13 * x % 73 == 1)
    assert oracle == 45
    assert f73.inv(13) == 45


def test_from_int_reduces(f73):
    assert f73.from_int(803 + 7) == 810 - 11 * 73 == 7
    assert f73.from_int(-1) == 72
    gf = BinaryField(8, 0x11B)
    assert gf.from_int(0x1FF) == 0xFF


def test_identities(f73, gf256):
    for f in (f73, gf256):
        assert f.add(5, 0) == 5
        assert f.inv(1) == 1
        assert f.pow(7, 0) == 1


def test_aes_field_inverse():
    gf = BinaryField(8, 0x11B)
    assert gf.mul(0x53, 0xCA) == 1
    assert gf.inv(0x53) == 0xCA


def test_zero_has_no_inverse(f73, gf256):
    for f in (f73, gf256, BinaryField(31, default_irreducible(31))):
        with pytest.raises(NotInvertibleError):
            f.inv(0)
        with pytest.raises(ZeroDivisionError):
            f.div(1, 0)


# -- construction ---------------------------------------------------------------

@pytest.mark.parametrize("bad", [1, 2, 4, 9, 91, 1001])
def test_prime_field_rejects_non_primes(bad):
    with pytest.raises(FieldError):
        PrimeField(bad)


def test_binary_field_rejects_reducible_polynomial():
    with pytest.raises(FieldError):
        BinaryField(8, 0x11A)       # divisible by x
    with pytest.raises(FieldError):
        BinaryField(4, 0b10101)     # (x^2+x+1)^2
    with pytest.raises(FieldError):
        BinaryField(8, 0x1B)        # wrong degree


def test_irreducibility_matches_trial_division():
    for poly in range(2 ** 2, 2 ** 10):
        assert gf2_is_irreducible(poly) == trial_division_irreducible(poly), hex(poly)


@pytest.mark.parametrize("m", range(1, 40))
def test_default_irreducible_has_degree_m(m):
    poly = default_irreducible(m)
    assert poly.bit_length() - 1 == m
    assert gf2_is_irreducible(poly)


def test_parse_field_forms():
    assert parse_field("73") == PrimeField(73)
    assert parse_field("prime:1009") == PrimeField(1009)
    assert parse_field("8:0x11b") == BinaryField(8, 0x11B)
    assert parse_field("binary:8:0x11b") == BinaryField(8, 0x11B)
    assert parse_field("2^8").m == 8
    with pytest.raises((FieldError, ValueError)):
        parse_field("bogus")


def test_encoding_round_trip(f73, gf256):
    assert f73.encode(17) == "17" and f73.decode("17") == 17
    assert gf256.encode(0xAB) == "0xab" and gf256.decode("0xab") == 0xAB
    with pytest.raises(ValueError):
        f73.decode("73")
    with pytest.raises(ValueError):
        gf256.decode("0x1ff")


# -- element wrapper ------------------------------------------------------------

def test_elements_of_different_fields_never_mix(f73, gf256):
    a = f73(3)
    with pytest.raises(FieldMismatchError):
        _ = a + PrimeField(79)(3)
    with pytest.raises(FieldMismatchError):
        _ = a * gf256(3)


def test_element_operators(f73):
    a, b = f73(70), f73(13)
    assert (a * b - f73(18) * f73(10)).value == 0
    assert (a / b * b) == a
    assert (-a + a).value == 0
    assert a ** 72 == f73(1)
    assert a + 3 == f73(0)


# -- field axioms and closure -------------------------------------------------

@pytest.mark.parametrize("f", FIELDS, ids=repr)
def test_field_axioms_on_random_triples(f):
    rng = np.random.default_rng(7)
    for _ in range(2000):
        a, b, c = (f.random(rng) for _ in range(3))
        assert f.add(a, b) == f.add(b, a)
        assert f.mul(a, b) == f.mul(b, a)
        assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
        assert f.add(f.add(a, b), c) == f.add(a, f.add(b, c))
        assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))
        assert f.add(a, f.neg(a)) == 0
        assert f.sub(f.add(a, b), b) == a
        if a:
            assert f.mul(a, f.inv(a)) == 1
        for x in (f.add(a, b), f.mul(a, b), f.neg(a), f.sub(a, c)):
            assert f.is_canonical(x)


@pytest.mark.parametrize("f", FIELDS, ids=repr)
def test_fermat_and_frobenius(f):
    rng = np.random.default_rng(11)
    for _ in range(50):
        a = f.random(rng)
        assert f.pow(a, f.order) == a


@given(st.integers(1, 2 ** 17 - 1), st.integers(0, 2 ** 17 - 1))
def test_char2_freshman_dream(a, b):
    f = BinaryField(17, default_irreducible(17))
    s = f.add(a, b)
    assert f.mul(s, s) == f.add(f.mul(a, a), f.mul(b, b))


@given(st.data())
def test_binary_mul_matches_schoolbook(data):
    f = data.draw(st.sampled_from([BinaryField(8, 0x11B), BinaryField(13, default_irreducible(13)),
                                   BinaryField(23, default_irreducible(23))]))
    a, b = data.draw(elements(f)), data.draw(elements(f))
    assert f.mul(a, b) == slow_gf2_mul(a, b, f.poly)


@given(st.integers(0, 1008), st.integers(0, 1008))
def test_prime_mul_matches_integer_arithmetic(a, b):
    assert PrimeField(1009).mul(a, b) == a * b % 1009


@pytest.mark.parametrize("f", [PrimeField(73), PrimeField(1009), BinaryField(8, 0x11B),
                               BinaryField(5, default_irreducible(5))], ids=repr)
def test_sqrt_is_exhaustively_correct(f):
    squares = {f.mul(x, x) for x in range(f.order)}
    for a in range(f.order):
        r = f.sqrt(a)
        if a in squares:
            assert r is not None and f.mul(r, r) == a
        else:
            assert r is None


def test_quadratic_solver_and_trace_exhaustive():
    f = BinaryField(9, default_irreducible(9))
    images = {f.add(f.mul(z, z), z) for z in range(f.order)}
    for c in range(f.order):
        z = f.solve_quadratic(c)
        assert (z is not None) == (c in images) == (f.trace(c) == 0)
        if z is not None:
            assert f.add(f.mul(z, z), z) == c


def test_vectorised_helpers_match_scalar_ops():
    f = BinaryField(10, default_irreducible(10))
    rng = np.random.default_rng(3)
    a = rng.integers(0, f.order, 500)
    b = rng.integers(0, f.order, 500)
    assert list(f.vmul(a, b)) == [f.mul(int(x), int(y)) for x, y in zip(a, b)]
    nz = a[a != 0]
    assert list(f.vinv(nz)) == [f.inv(int(x)) for x in nz]
    assert list(f.vtrace(a)) == [f.trace(int(x)) for x in a]


def test_table_and_bitwise_multiplication_agree():
    f = BinaryField(12, default_irreducible(12))
    rng = np.random.default_rng(5)
    for _ in range(500):
        a, b = f.random(rng), f.random(rng)
        assert f.mul(a, b) == f._mul_bitwise(a, b)


def test_binary_field_pickles_without_tables():
    import pickle
    f = BinaryField(16, default_irreducible(16))
    f.np_tables()
    g = pickle.loads(pickle.dumps(f))
    assert g == f and g.mul(0x1234, 0x4321) == f.mul(0x1234, 0x4321)
    assert len(pickle.dumps(f)) < 200
