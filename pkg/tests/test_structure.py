import itertools
import random
from fractions import Fraction

import numpy as np
import pytest

from hahnauto import dfao as dfa
from hahnauto import gps, structure
from hahnauto.digits import SabcParams, sabc_contains
from hahnauto.errors import FormatError, PreconditionError
from hahnauto.structure import PeriodicityBounds, RecurrenceSystem

from conftest import F2, F3, F4, descending_machine
from test_gps import staircase_oracle


def frac_value(s, p):
    return sum((Fraction(d, p ** (i + 1)) for i, d in enumerate(s)), Fraction(0))


def frac_strings(p, max_len):
    for n in range(max_len + 1):
        yield from itertools.product(range(p), repeat=n)


def canonical_frac_strings(p, max_len):
    return (s for s in frac_strings(p, max_len) if not s or s[-1])


def test_normalize_merges_dead_states():
    A = dfa.Dfao(F2, 2, False, dfa.MSD_FRACTIONAL, 0, (0, 1, 0, 0),
                 ((1, 2), (1, 3), (2, 2), (3, 3)))
    B = structure.normalize_for_analysis(A)
    assert len(structure.terminal_states(B)) == 1
    for s in frac_strings(2, 6):
        want = A.run(s) if not s or s[-1] else 0
        assert B.run(s) == want
    with pytest.raises(dfa.IncompatibleError):
        structure.normalize_for_analysis(dfa.constant(F2, 2, 1))


def test_staircase_passes_single_reentry(z2):
    B = structure.normalize_for_analysis(structure.fractional_machine(z2))
    res = structure.check_single_reentry(B)
    assert isinstance(res, structure.ReentryOk)


def test_descending_machine_witness():
    x = descending_machine()
    B = structure.normalize_for_analysis(structure.fractional_machine(x))
    w = structure.check_single_reentry(B)
    assert isinstance(w, structure.ReentryWitness)
    values = [frac_value(w.family(k), 2) for k in range(6)]
    assert all(a > b for a, b in zip(values, values[1:]))
    assert all(B.run(w.family(k)) != 0 for k in range(6))
    with pytest.raises(PreconditionError) as err:
        structure.certify_sabc(structure.fractional_machine(x))
    assert isinstance(err.value.witness, structure.ReentryWitness)


@pytest.mark.parametrize("F", [F2, F3])
def test_certify_staircase(F):
    z = gps.staircase_machine(F)
    rep = structure.certify_gps(z)
    p = F.p
    assert rep.params.a == p ** rep.n - 1 and rep.params.b == 0
    res = gps.support_enum(z, max_terms=200)
    assert len(res.exponents) == 200
    assert all(sabc_contains(e, rep.params, p)[0] for e in res.exponents)
    text = rep.to_text()
    assert text.startswith(f"m {rep.m}\nn {rep.n}\na {rep.params.a}\n")


def test_certify_nested_cycles_uses_lcm():
    # a 2-cycle on digit 1, exit on 0 into a 3-cycle on digit 1 that carries the output
    D = 5
    A = dfa.Dfao(F2, 2, False, dfa.MSD_FRACTIONAL, 0, (0, 0, 0, 1, 0, 0),
                 ((2, 1), (D, 0), (D, 3), (D, 4), (D, 2), (D, D)))
    rep = structure.certify_sabc(A)
    assert sorted(rep.class_sizes) == [1, 2, 3]
    assert rep.n == 6 and rep.params.a == 2 ** 6 - 1


def random_well_ordered(rng, count, p=2, nstates=4):
    out = []
    while len(out) < count:
        A = dfa.random_dfao(rng, F2 if p == 2 else F3, p, nstates, dfa.MSD_FRACTIONAL)
        B = structure.normalize_for_analysis(A)
        if isinstance(structure.check_single_reentry(B), structure.ReentryOk):
            out.append(A)
    return out


@pytest.mark.parametrize("p", [2, 3])
def test_certified_set_contains_support(p):
    rng = random.Random(11 + p)
    for A in random_well_ordered(rng, 25, p):
        rep = structure.certify_sabc(A)
        B = structure.normalize_for_analysis(A)
        for s in frac_strings(p, 9 if p == 2 else 6):
            if s and s[-1] == 0:
                continue
            if B.run(s):
                assert sabc_contains(frac_value(s, p), rep.params, p)[0], (A, s)


def test_structural_periodicity_bounds():
    rng = random.Random(3)
    for _ in range(200):
        p = rng.choice([2, 3])
        A = dfa.random_dfao(rng, F2 if p == 2 else F3, p, rng.randrange(1, 7),
                            dfa.MSD_FRACTIONAL)
        b = structure.structural_periodicity(A)
        assert 0 <= b.M <= A.nstates and 1 <= b.N <= A.nstates
        top = p - 1
        for s in dfa.reachable(A):
            seq = []
            cur = s
            for _ in range(4 * A.nstates + 4):
                seq.append(cur)
                cur = A.trans[cur][top]
            assert any(all(seq[n] == seq[n + P] for n in range(b.M, len(seq) - P))
                       for P in range(1, b.N + 1))


def test_index_periodicity_staircase(z2):
    rep = structure.certify_gps(z2)
    B = structure.normalize_for_analysis(structure.fractional_machine(z2))
    bounds = structure.structural_periodicity(B)
    res = structure.check_index_periodicity(z2.coeff, rep.params, bounds, 2)
    assert res.ok and res.families > 0


def square_oracle(r):
    """1 on exponents 1 - 2^-(k^2), k >= 1: support well-ordered, not automatic."""
    r = Fraction(r)
    if not staircase_oracle(r, 2):
        return 0
    i = (1 / (1 - r)).numerator.bit_length() - 1
    return 1 if round(i ** 0.5) ** 2 == i else 0


def test_index_periodicity_flags_square_exponents():
    res = structure.check_index_periodicity(square_oracle, SabcParams(1, 0, 1),
                                            PeriodicityBounds(2, 2), 2)
    assert not res.ok
    m, digits, j, seq = res.violations[0]
    assert 1 in seq


def test_build_from_criterion_reproduces_staircase():
    coeff = lambda r: staircase_oracle(r, 2)
    res = structure.build_from_criterion(coeff, 2, F2, 1, 1, 1)
    assert res.runcap == 2 and res.provenance["rule"] == "runcap = M + N!"
    A = res.machine
    assert A.nstates <= structure.criterion_state_count(2, 1, res.runcap)
    for s in canonical_frac_strings(2, 12):
        assert A.run(s) == coeff(frac_value(s, 2))


def test_build_from_criterion_f3_and_override():
    coeff = lambda r: staircase_oracle(r, 3)
    res = structure.build_from_criterion(coeff, 3, F3, 1, 1, 2, runcap=3)
    assert res.provenance["rule"] == "override" and res.strip == 2
    for s in canonical_frac_strings(3, 7):
        assert res.machine.run(s) == coeff(frac_value(s, 3))
    with pytest.raises(ValueError):
        structure.build_from_criterion(coeff, 3, F3, 1, 1, 2, runcap=2)


def test_build_from_criterion_warns_on_constant_term():
    with pytest.warns(RuntimeWarning):
        res = structure.build_from_criterion(lambda r: 1, 2, F2, 0, 0, 1)
    assert res.warnings


FIB = RecurrenceSystem(F2, (((1,), (1,), (1,)),))


def test_fibonacci_mod_two():
    cert = structure.recurrence_periodicity(FIB)
    assert (cert.head, cert.period, cert.dim) == (0, 3, 2)
    assert structure.verify_certificate(FIB, cert)
    seq = structure.simulate_recurrence(FIB, [0, 1], 9)
    assert [int(v[0]) for v in seq] == [0, 1, 1, 0, 1, 1, 0, 1, 1]


def random_recurrence(rng, F, k, n, equations=1):
    """Unit leading block, so each step is determined; later equations only constrain."""
    w = n + 1
    eqs = []
    for e in range(w * equations):
        rows = tuple(tuple(rng.randrange(F.q) for _ in range(w)) for _ in range(k))
        last = tuple(int(e == j) for j in range(w))
        eqs.append(rows + (last,))
    return RecurrenceSystem(F, tuple(eqs))


def brute_period(R, state):
    """First repeat of the state vector S_m under the recurrence."""
    limit = R.field.q ** (R.k * (R.n + 1)) + R.k + 2
    seq = structure.simulate_recurrence(R, state, limit)
    seen = {}
    for m in range(limit - R.k):
        key = tuple(int(x) for v in seq[m:m + R.k] for x in v)
        if key in seen:
            return seen[key], m - seen[key]
        seen[key] = m
    raise AssertionError("no repeat")


@pytest.mark.parametrize("F", [F2, F4])
def test_random_recurrences(F):
    rng = random.Random(F.q)
    for _ in range(50):
        k, n = rng.randrange(1, 4), rng.randrange(0, 2)
        R = random_recurrence(rng, F, k, n, equations=rng.randrange(1, 3))
        cert = structure.recurrence_periodicity(R)
        assert structure.verify_certificate(R, cert)
        for v in cert.basis:
            head, period = brute_period(R, v)
            assert head <= cert.head and cert.period % period == 0


def test_recurrence_text_round_trip():
    R = RecurrenceSystem(F4, (((1, 2), (0, 3)), ((1, 0), (0, 1))), ((1, 3),))
    text = structure.recurrence_to_text(R)
    assert structure.recurrence_from_text(text) == R
    assert structure.recurrence_to_text(structure.recurrence_from_text(text)) == text
    with pytest.raises(FormatError):
        structure.recurrence_from_text("recurrence v1 field p=2 k=1 k=1 n=0\neq 1\n")
