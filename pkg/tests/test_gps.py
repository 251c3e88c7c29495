import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hahnauto import dfao as dfa
from hahnauto import gps
from hahnauto.errors import AccumulationError, DomainError, FormatError, PreconditionError
from hahnauto.gps import OreForm, TruncGps
from hahnauto.poly import Poly

from conftest import F2, F3, F4, descending_machine


def staircase_oracle(r, p):
    """1 on exponents 1 - p^-i (i >= 1), else 0."""
    r = Fraction(r)
    gap = 1 - r
    if gap <= 0 or gap.numerator != 1:
        return 0
    d = gap.denominator
    while d % p == 0:
        d //= p
    return 1 if d == 1 and gap.denominator > 1 else 0


def staircase_form(F):
    t = Poly.t(F)
    top = t ** (F.p - 1)
    return OreForm(((0, -top), (1, Poly.const(F, 1))), -top)


def sample_exponents(p, count=300, seed=1):
    rng = random.Random(seed)
    out = [Fraction(k) - Fraction(1, p ** i) for k in range(3) for i in range(21)]
    out = [e for e in out if e >= 0]
    out += [gps.random_exponent(rng, p) for _ in range(count)]
    return out


@pytest.mark.parametrize("F", [F2, F3])
def test_staircase_coefficients(F):
    z = gps.staircase_machine(F)
    for e in sample_exponents(F.p):
        assert z(e) == staircase_oracle(e, F.p)


def test_support_enum_staircase(z2):
    res = gps.support_enum(z2, Fraction(63, 64))
    assert res.complete
    assert res.exponents == tuple(1 - Fraction(1, 2 ** i) for i in range(1, 6))
    res = gps.support_enum(z2, math.inf, max_terms=8)
    assert len(res.exponents) == 8 and res.complete


def test_support_enum_no_least_element_warns():
    with pytest.warns(RuntimeWarning):
        res = gps.support_enum(descending_machine(), 1, max_terms=5, budget=200)
    assert not res.complete and res.warning


def test_support_enum_integer_series():
    ones = dfa.constant(F2, 2, 1, dfa.MSD_INTEGER)
    x = gps.integer_series_machine(ones)
    assert gps.support_enum(x, 6).exponents == tuple(Fraction(n) for n in range(6))


@pytest.mark.parametrize("F", [F2, F3])
def test_staircase_satisfies_its_ore_relation_pointwise(F):
    z = gps.staircase_machine(F)
    rep = gps.verify_ore_pointwise(z, staircase_form(F), sample_exponents(F.p, 500))
    assert rep.ok, rep.failures[:5]


def test_ore_relation_over_f4(z2):
    # z^2 = t z + t over F_2 gives z^4 = t^3 z + t^3 + t^2
    z = gps.staircase_machine(F4, 2)
    t = Poly.t(F4)
    form = OreForm(((0, t ** 3), (1, Poly.const(F4, 1))), t ** 3 + t ** 2)
    assert gps.verify_ore_pointwise(z, form, sample_exponents(2)).ok


def test_wrong_ore_relation_fails(z2):
    t = Poly.t(F2)
    form = OreForm(((0, t), (1, Poly.const(F2, 1))), None)
    rep = gps.verify_ore_pointwise(z2, form, [Fraction(1)])
    assert not rep.ok


def test_truncation_and_ore_substitution(z2):
    T = gps.from_automaton(z2, Fraction(63, 64))
    assert len(T.terms) == 5
    R = gps.ore_substitute(T, staircase_form(F2))
    # z^2 is known below 63/32 and t*z below 127/64
    assert R.is_zero() and R.frontier == Fraction(63, 32)


def test_truncation_refuses_accumulation():
    with pytest.raises(AccumulationError), pytest.warns(RuntimeWarning):
        gps.from_automaton(descending_machine(), 1, max_terms=10, budget=500)


def test_truncgps_frontier_rules():
    x = TruncGps(F2, [(Fraction(1, 2), 1)], frontier=2)
    y = TruncGps(F2, [(1, 1)], frontier=3)
    assert (x + y).frontier == 2
    assert (x * y).frontier == min(2 + 1, 3 + Fraction(1, 2))
    assert (x * x).terms == ((1, 1),) and (x * x).frontier == Fraction(5, 2)
    assert x.frobenius().frontier == 4
    assert x.scale_exponents(2).terms == ((1, 1),)
    with pytest.raises(ValueError):
        x.coeff(2)
    with pytest.raises(DomainError):
        TruncGps(F2, [(-1, 1)])


def test_truncgps_ring_arithmetic():
    t = Poly.t(F3)
    a = TruncGps.from_poly(1 + t)
    b = TruncGps.monomial(F3, Fraction(1, 3), 2)
    assert (a * b).terms == ((Fraction(1, 3), 2), (Fraction(4, 3), 2))
    assert (b ** 3).terms == ((1, 2),)  # 2^3 = 8 = 2 in F_3
    assert (a - a).is_zero()
    assert a + 1 == TruncGps.from_poly(2 + t)
    assert not TruncGps(F3, [(Fraction(1, 5), 1)]).automaton_representable


@given(st.lists(st.tuples(st.fractions(min_value=0, max_value=5, max_denominator=16),
                          st.integers(1, 2)), max_size=6),
       st.lists(st.tuples(st.fractions(min_value=0, max_value=5, max_denominator=16),
                          st.integers(1, 2)), max_size=6))
@settings(max_examples=60, deadline=None)
def test_truncgps_frobenius_is_multiplicative(xs, ys):
    x, y = TruncGps(F3, xs), TruncGps(F3, ys)
    assert (x * y).frobenius() == x.frobenius() * y.frobenius()
    assert (x + y).frobenius() == x.frobenius() + y.frobenius()
    assert x ** 3 == x.frobenius()


def test_text_round_trip():
    x = TruncGps(F4, [(Fraction(3, 4), 2), (5, 3)], frontier=Fraction(33, 4))
    text = gps.to_text(x)
    assert text.splitlines()[0].startswith("gps v1 field")
    assert gps.from_text(text) == x
    assert gps.to_text(gps.from_text(text)) == text
    with pytest.raises(FormatError):
        gps.from_text("gps v1 field p=2 k=1 frontier=1\n3/4 1\n3/4 1\n")
    with pytest.raises(FormatError):
        gps.from_text("nonsense\n")


def test_add_scale_frobenius_are_pointwise(z2):
    w = gps.exponent_scale_pk(z2, -1)
    s = gps.add(z2, w)
    c = gps.scalar_multiple(s, 0)
    for e in sample_exponents(2, 100):
        assert s(e) == (z2(e) + w(e)) % 2
        assert c(e) == 0
    assert gps.frobenius_power(z2, 1).machine == z2.machine


@pytest.mark.parametrize("k", [-2, -1, 1, 2])
@pytest.mark.parametrize("F", [F2, F3])
def test_exponent_scale_pk(F, k):
    z = gps.staircase_machine(F)
    y = gps.exponent_scale_pk(z, k)
    p = F.p
    for e in sample_exponents(p, 150, seed=k + 7):
        assert y(e) == z(e / Fraction(p) ** k)


def test_mul_int_frac_and_precondition(z2):
    c = dfa.reverse(dfa.Dfao(F2, 2, False, dfa.LSD_INTEGER, 0, (0, 1, 0),
                             ((0, 1), (1, 2), (2, 2))))
    x = gps.mul_int_frac(c, z2)
    for e in sample_exponents(2, 150):
        n = math.floor(e)
        f = e - n
        assert x(e) == c.run(dfa_msd(n)) * z2(f) % 2
    big = gps.exponent_scale_pk(z2, 1)  # support reaches 1
    with pytest.raises(PreconditionError) as err:
        gps.mul_int_frac(c, big)
    assert err.value.witness >= 1


def dfa_msd(n):
    return [int(b) for b in bin(n)[2:]] if n else []


def test_decompose_recombine_identity(z2):
    rng = random.Random(5)
    for _ in range(10):
        c = dfa.random_dfao(rng, F2, 2, 3, dfa.MSD_INTEGER)
        x = gps.mul_int_frac(c, z2)
        x = gps.add(x, gps.exponent_scale_pk(z2, -2))
        pairs = gps.decompose(x)
        assert len(pairs) <= x.nstates
        for cj, zj in pairs:
            assert gps.support_in_unit_interval(zj)[0]
        y = gps.recombine(pairs)
        assert dfa.minimize(y.machine) == dfa.minimize(x.machine)


def test_decompose_zero_series():
    pairs = gps.decompose(gps.zero_series(F3))
    assert len(pairs) == 1
    y = gps.recombine(pairs)
    assert all(y(e) == 0 for e in sample_exponents(3, 30))
    with pytest.raises(ValueError):
        gps.recombine([])
