import itertools

import pytest

from zkipcp.errors import DivideByZero, NotIrreducible, NotPrime, SubsetTooLarge
from zkipcp.field import (
    Field,
    binary_field,
    complement_subset,
    enumerate_subset,
    make_field,
    prime_field,
)
from zkipcp.rng import DomainRNG

GF8 = binary_field(3, 0b1011)  # x^3 + x + 1


def test_make_field_examples():
    f5 = make_field("prime", modulus=5)
    assert [f5.element(i) for i in range(5)] == [0, 1, 2, 3, 4]
    with pytest.raises(NotPrime):
        make_field("prime", modulus=4)
    f8 = make_field("binary", degree=3, poly=0b1011)
    assert f8.order == 8


def test_reducible_poly_rejected():
    # x^3 + 1 = (x+1)(x^2+x+1) over GF(2)
    with pytest.raises(NotIrreducible):
        binary_field(3, 0b1001)
    with pytest.raises(NotIrreducible):
        binary_field(2, 0b101)  # x^2 + 1 = (x+1)^2


def test_inverse_examples():
    f5 = prime_field(5)
    assert f5.inv(1) == 1
    assert f5.inv(2) == 3  # 2*3 = 6 = 1 mod 5
    # in GF(8) mod x^3+x+1: x * (x^2+1) = x^3+x = 1
    x = 0b010
    assert GF8.inv(x) == 0b101
    assert GF8.mul(x, 0b101) == 1
    with pytest.raises(DivideByZero):
        f5.inv(0)


def _check_axioms(f, triples):
    for a, b, c in triples:
        assert f.add(a, b) == f.add(b, a)
        assert f.mul(a, b) == f.mul(b, a)
        assert f.add(f.add(a, b), c) == f.add(a, f.add(b, c))
        assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
        assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))
        assert f.add(a, f.neg(a)) == 0
        if a != 0:
            assert f.mul(a, f.inv(a)) == 1


@pytest.mark.parametrize("field", [prime_field(2), prime_field(5), prime_field(13),
                                   GF8, binary_field(4, 0b10011)])
def test_field_axioms_exhaustive(field):
    assert field.order <= 16
    _check_axioms(field, itertools.product(field.elements(), repeat=3))


@pytest.mark.parametrize("field", [prime_field(101), prime_field((1 << 31) - 1),
                                   binary_field(17, (1 << 17) | 0b1001)])
def test_field_axioms_random(field):
    rng = DomainRNG(7, "axioms")
    triples = [tuple(rng.field_element(field) for _ in range(3)) for _ in range(10_000)]
    _check_axioms(field, triples)


def test_characteristic_two():
    for x in GF8.elements():
        assert GF8.add(x, x) == 0


def test_enumeration_round_trip():
    for f in (prime_field(13), GF8):
        for i in range(f.order):
            assert f.index(f.element(i)) == i
        assert f.element(0) == 0
        assert f.element(1) == 1


def test_subsets():
    f5 = prime_field(5)
    h = enumerate_subset(f5, 2, require_zero=True)
    assert h.elements == (0, 1)
    assert enumerate_subset(f5, 5).elements == (0, 1, 2, 3, 4)
    with pytest.raises(SubsetTooLarge):
        enumerate_subset(f5, 6)
    i = complement_subset(f5, h)
    assert i.elements == (2, 3, 4)


def test_subfield_embedding():
    gf64 = binary_field(6, 0b1011011)
    sub = gf64.subfield_elements(3)
    assert len(sub) == 8
    s = set(sub)
    for a in sub:
        for b in sub:
            assert gf64.mul(a, b) in s
            assert gf64.add(a, b) in s


def test_serialization():
    for f in (prime_field(101), GF8):
        assert Field.from_doc(f.spec_doc()) == f
        for v in list(f.elements())[:8]:
            assert f.from_hex(f.to_hex(v)) == v


def test_element_wrapper():
    f5 = prime_field(5)
    a = f5.wrap(2)
    b = f5.wrap(4)
    assert (a + b).value == 1
    assert (a * b).value == 3
    assert (a - b).value == 3
    assert (-a).value == 3
    assert (a / b).value == f5.mul(2, f5.inv(4))
    assert a + 3 == 0
