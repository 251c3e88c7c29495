import random

import pytest
from hypothesis import given, settings, strategies as st

from hahnauto.errors import ConfigMismatchError, FormatError
from hahnauto.field import FieldConfig, FieldElement, is_irreducible_mod_p, parse_field_spec

FIELDS = [FieldConfig(2), FieldConfig(3), FieldConfig(2, 2), FieldConfig(3, 2), FieldConfig(2, 3),
          FieldConfig(5)]


def poly_mulmod(a, b, mod, p):
    """Schoolbook product of coordinate vectors reduced by a monic modulus."""
    e = len(mod) - 1
    out = [0] * (2 * e)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    for k in range(len(out) - 1, e - 1, -1):
        c = out[k]
        if c:
            for i in range(e + 1):
                out[k - e + i] = (out[k - e + i] - c * mod[i]) % p
    return out[:e]


def test_char_two_addition():
    F = FieldConfig(2)
    assert F.add(1, 1) == 0


def test_f4_product_of_generator_and_its_successor():
    F = FieldConfig(2, 2)
    assert F.modulus == (1, 1, 1)
    g = F.from_digits([0, 1])
    g1 = F.from_digits([1, 1])
    assert F.mul(g, g1) == 1


@pytest.mark.parametrize("F", FIELDS, ids=repr)
def test_multiplication_matches_schoolbook_oracle(F):
    rng = random.Random(7)
    for _ in range(200):
        a, b = rng.randrange(F.q), rng.randrange(F.q)
        want = poly_mulmod(F.digits(a), F.digits(b), F.modulus, F.p)
        assert F.digits(F.mul(a, b)) == want


@pytest.mark.parametrize("F", FIELDS, ids=repr)
def test_field_axioms_on_random_triples(F):
    rng = random.Random(11)
    for _ in range(1000):
        a, b, c = (rng.randrange(F.q) for _ in range(3))
        assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))
        assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
        assert F.add(a, F.neg(a)) == 0
        if a:
            assert F.mul(a, F.inv(a)) == 1


@pytest.mark.parametrize("F", FIELDS, ids=repr)
def test_frobenius_order_divides_degree(F):
    rng = random.Random(3)
    for _ in range(50):
        a = rng.randrange(F.q)
        b = a
        for _ in range(F.e):
            b = F.frobenius(b)
        assert b == a
        assert F.frobenius(a) == F.pow(a, F.p)


def test_inverse_of_zero_raises():
    with pytest.raises(ZeroDivisionError):
        FieldConfig(3).inv(0)


def test_mixed_configs_rejected():
    a = FieldElement(FieldConfig(2), 1)
    b = FieldElement(FieldConfig(3), 1)
    with pytest.raises(ConfigMismatchError):
        a + b


def test_rejects_composite_and_reducible():
    with pytest.raises(ValueError):
        FieldConfig(4)
    with pytest.raises(ValueError):
        FieldConfig(2, 2, (1, 0, 1))  # X^2 + 1 = (X + 1)^2


def test_default_modulus_is_smallest_irreducible():
    F = FieldConfig(2, 3)
    assert F.modulus == (1, 1, 0, 1)
    assert is_irreducible_mod_p(F.modulus, 2)


def test_field_spec_parsing():
    assert parse_field_spec("2") == FieldConfig(2)
    assert parse_field_spec("2^2") == FieldConfig(2, 2)
    assert parse_field_spec("2^2:[1,1,1]") == FieldConfig(2, 2, (1, 1, 1))
    with pytest.raises(FormatError):
        parse_field_spec("two")


def test_element_text_round_trip():
    F = FieldConfig(3, 2)
    for a in range(F.q):
        assert F.parse(F.format(a)) == a


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 8), st.integers(0, 8), st.integers(0, 8))
def test_element_wrapper_ring_laws(a, b, c):
    F = FieldConfig(3, 2)
    x, y, z = (F.elem(F.from_digits([v % 3, v // 3])) for v in (a, b, c))
    assert (x + y) * z == x * z + y * z
    assert x - x == F.elem(0)
