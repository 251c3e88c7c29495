import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hahnauto import dfao as dfa
from hahnauto import gps
from hahnauto import semilinear as sl
from hahnauto.christol import OreRelation
from hahnauto.errors import FormatError, InconclusiveError, PreconditionError, PrescalingError
from hahnauto.poly import Poly, RatFunc, TruncSeries

from conftest import F2, F3, F4


def system(F, rows, prescale=None):
    return sl.SemilinearSystem.from_rows(F, rows, prescale)


def t_of(F):
    return Poly.t(F)


@pytest.mark.parametrize("F", [F2, F3, F4])
def test_small_system_dimensions(F):
    t = t_of(F)
    for rows, want in (([[1]], 1), ([[t]], 0), ([[1, 0], [0, t]], 1)):
        S = system(F, rows)
        basis = sl.solve_semilinear(S, 256)
        assert basis.dim == want and basis.status == "stable"
        assert [d for _, d in basis.dims] == [want] * 3
        rep = sl.fq_structure_check(S, basis)
        assert rep.ok
        for v in basis.vectors:
            assert sl.verify_solution(S, v, 256)


def test_constant_solutions_of_identity():
    basis = sl.solve_semilinear(system(F3, [[1]]), 64)
    (v,) = basis.vectors
    assert v[0].coeffs[0] != 0 and not any(v[0].coeffs[1:])


@pytest.mark.parametrize("F", [F2, F3])
def test_random_systems_are_bounded(F):
    rng = random.Random(F.p)
    for _ in range(30):
        S = sl.random_system(rng, F)
        basis = sl.solve_semilinear(S, 64)
        assert basis.conclusive
        assert sl.fq_structure_check(S, basis).ok


def test_solutions_restrict_to_lower_precision():
    rng = random.Random(9)
    for _ in range(10):
        S = sl.random_system(rng, F2)
        for v in sl.solve_at(S, 64):
            assert sl.verify_solution(S, [x.truncate(32) for x in v], 32)


@given(st.lists(st.integers(0, 2), min_size=12, max_size=12),
       st.lists(st.integers(0, 2), min_size=12, max_size=12),
       st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_residual_is_additive(a, b, seed):
    S = sl.random_system(random.Random(seed), F3)
    D = 6
    v = [TruncSeries(F3, a[:D], D), TruncSeries(F3, a[D:], D)]
    w = [TruncSeries(F3, b[:D], D), TruncSeries(F3, b[D:], D)]
    vw = [x + y for x, y in zip(v, w)]
    lhs = sl.residual(S, vw, D)
    rhs = [x + y for x, y in zip(sl.residual(S, v, D), sl.residual(S, w, D))]
    assert lhs == rhs


def test_prescaling():
    F = F2
    t = t_of(F)
    inv_t = RatFunc(Poly.const(F, 1), t)
    S = system(F, [[inv_t]])
    assert S.needed_prescale == 1 and S.shift == 1
    basis = sl.solve_semilinear(S, 64)  # t v = v^2 has the solution v = t
    assert basis.dim == 1 and basis.vectors[0][0].coeffs[:3] == (0, 1, 0)
    assert system(F, [[inv_t]], prescale=3).shift == 3
    with pytest.raises(PrescalingError):
        sl.solve_semilinear(system(F, [[inv_t * inv_t]], prescale=1), 16)


def test_frobenius_table_starts_with_q(f2):
    basis, Q = sl.staircase_basis_fixture(f2)
    R = sl.frobenius_table(Q, 3)
    assert R[1] == Q
    assert R[0][0][0] == RatFunc.one(f2) and not R[0][0][1]


def geometric_relation(F):
    """Relation for x = z / (1 - t): u^p x^p - t^(p-1) u x - t^(p-1) = 0, u = 1 - t."""
    t = t_of(F)
    u = 1 - t
    top = t ** (F.p - 1)
    return OreRelation((-(top * u), u ** F.p), -top)


def geometric_x(F):
    ones = dfa.constant(F, F.p, 1, dfa.MSD_INTEGER)
    return gps.mul_int_frac(ones, gps.staircase_machine(F))


@pytest.mark.parametrize("F", [F2, F3])
def test_known_solution_embeds(F):
    from hahnauto.christol import homogenize

    basis, Q = sl.staircase_basis_fixture(F)
    spec = sl.d_table(homogenize(geometric_relation(F)), Q)
    S = sl.build_e_system(spec)
    D = 48
    geom = TruncSeries(F, [1] * (D * F.q ** spec.N), D * F.q ** spec.N)
    c = [geom, TruncSeries.zero(F, geom.precision)]
    assert sl.verify_solution(S, sl.embed_solution(c, spec.N, D), D)


def random_spec(rng, F, r, N):
    def entry():
        return RatFunc(Poly(F, [rng.randrange(F.q) for _ in range(3)]))
    d = tuple(tuple(tuple(entry() for _ in range(N)) for _ in range(r)) for _ in range(r))
    return sl.ESystemSpec(F, r, N, d)


def test_random_e_systems_have_chain_structure():
    rng = random.Random(4)
    for _ in range(15):
        F = rng.choice([F2, F3])
        spec = random_spec(rng, F, rng.randrange(1, 3), rng.randrange(1, 3))
        S = sl.build_e_system(spec)
        basis = sl.solve_semilinear(S, 32)
        for v in basis.vectors:
            for i in range(spec.r):
                for j in range(1, spec.N):
                    lo = v[sl.e_index(spec.N, i, j)]
                    hi = v[sl.e_index(spec.N, i, j + 1)].frobenius()
                    assert lo == TruncSeries(F, hi.coeffs, lo.precision)


def test_literal_index_mode():
    rng = random.Random(1)
    spec = random_spec(rng, F2, 2, 3)
    a = sl.build_e_system(spec)
    b = sl.build_e_system(spec, literal=True)
    assert a.n == b.n == 6 and a != b
    with pytest.raises(ValueError):
        sl.build_e_system(random_spec(rng, F2, 3, 2), literal=True)


def test_text_formats_round_trip():
    F = F4
    t = t_of(F)
    S = system(F, [[RatFunc(t, 1 + t), 2], [0, t ** 3]], prescale=2)
    text = sl.system_to_text(S)
    assert sl.system_from_text(text) == S and sl.system_to_text(sl.system_from_text(text)) == text
    spec = random_spec(random.Random(2), F, 2, 2)
    assert sl.espec_from_text(sl.espec_to_text(spec)) == spec
    rel = geometric_relation(F3)
    assert sl.ore_from_text(sl.ore_to_text(rel)) == rel
    v = [TruncSeries(F, [0, 1, 3], 3), TruncSeries.zero(F, 3)]
    assert sl.vector_from_text(sl.vector_to_text(F, v)) == (F, v)
    for bad in ("semilinear v1 field p=2 k=1 n=1\n1 1 : 1\n", "ore v1 field p=2 k=1\n",
                "junk\n"):
        with pytest.raises(FormatError):
            for parse in (sl.system_from_text, sl.ore_from_text):
                parse(bad)


@pytest.mark.parametrize("F", [F2, F3])
def test_pipeline_geometric_times_staircase(F):
    basis, Q = sl.staircase_basis_fixture(F)
    res = sl.algebraic_to_automatic_pipeline(geometric_x(F), geometric_relation(F), basis, Q)
    assert res.ok and res.checked == 500
    c0, c1 = res.c_machines
    assert c0.nstates == 1 and c0.outputs == (1,)
    assert all(o == 0 for o in c1.outputs)


def test_pipeline_staircase_itself(f2):
    basis, Q = sl.staircase_basis_fixture(f2)
    t = t_of(f2)
    rel = OreRelation((-t, Poly.const(f2, 1)), -t)
    res = sl.algebraic_to_automatic_pipeline(basis[0], rel, basis, Q)
    assert res.ok
    c0, c1 = res.c_machines
    # the series 1 needs two states: a one-state machine would output 1 everywhere
    assert c0.nstates == 2 and all(o == 0 for o in c1.outputs)
    assert [c0.run([int(b) for b in bin(n)[2:]] if n else []) for n in range(5)] == [1, 0, 0, 0, 0]


@pytest.mark.parametrize("F", [F2, F3])
def test_pipeline_two_component_fixture(F):
    """x = (z + 1) / (1 - t), given as a coefficient function."""
    basis, Q = sl.staircase_basis_fixture(F)
    t = t_of(F)
    u = 1 - t
    rel = OreRelation((-(t ** (F.p - 1) * u), u ** F.p), Poly.const(F, F.neg(1)))
    z = basis[0]
    x = lambda e: F.add(z.coeff(e - int(e)), 1 if Fraction(e).denominator == 1 else 0)
    res = sl.algebraic_to_automatic_pipeline(x, rel, basis, Q)
    assert res.ok
    assert all(m.nstates == 1 and m.outputs == (1,) for m in res.c_machines)


def test_pipeline_with_truncated_input(f2):
    """x = 1 / (1 - t) known below t^24 lives on the basis element 1."""
    basis, Q = sl.staircase_basis_fixture(f2)
    t = t_of(f2)
    x = gps.TruncGps(f2, [(n, 1) for n in range(24)], frontier=24)
    rel = OreRelation((1 - t,), Poly.const(f2, 1))
    res = sl.algebraic_to_automatic_pipeline(x, rel, basis, Q, D=24, samples=200)
    assert res.ok
    assert all(o == 0 for o in res.c_machines[0].outputs)
    assert res.c_machines[1].outputs == (1,)


def test_pipeline_reports_mismatches(f2):
    basis, Q = sl.staircase_basis_fixture(f2)
    ones = dfa.constant(f2, 2, 1, dfa.MSD_INTEGER)
    # support off the sampled fractions: the fit succeeds but validation catches it
    other = gps.mul_int_frac(ones, gps.exponent_scale_pk(basis[0], -1))
    res = sl.algebraic_to_automatic_pipeline(other, geometric_relation(f2), basis, Q)
    assert not res.ok and res.mismatches


def test_pipeline_rejects_inconsistent_input(f2):
    basis, Q = sl.staircase_basis_fixture(f2)
    with pytest.raises(InconclusiveError):
        sl.algebraic_to_automatic_pipeline(basis[0], geometric_relation(f2), basis, Q)
    with pytest.raises(PreconditionError):
        sl.algebraic_to_automatic_pipeline(basis[0], geometric_relation(f2),
                                           [gps.exponent_scale_pk(basis[0], 1)], [[1]])


def test_dimension_is_nonincreasing_in_precision():
    rng = random.Random(12)
    for _ in range(40):
        F = rng.choice([F2, F3])
        S = sl.random_system(rng, F, n=rng.choice([1, 2, 3]))
        dims = [len(sl.solve_at(S, D)) for D in (1, 2, 4, 8, 16, 32, 64)]
        assert all(a >= b for a, b in zip(dims, dims[1:])), dims
