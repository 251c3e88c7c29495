"""Semilinear Frobenius systems A v^q = v over F_q(t) and the coefficient pipeline.

Power series solutions of A v^q = v form an F_q-vector space, and the map
v -> A v^q - v is F_q-linear in the unknown coefficients of v.  Truncating
v at t^D therefore turns the system into ordinary linear algebra over F_q.
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import dfao as dfa
from . import gps
from .christol import OreRelation, guess_relation, homogenize, kernel_automaton, series_from_dfao
from .errors import (AmbiguityError, FormatError, InconclusiveError, PrescalingError)
from .field import FieldConfig
from .linalg import nullspace, rank, rref
from .poly import Poly, RatFunc, TruncSeries, parse_poly, parse_ratfunc


# -- systems --------------------------------------------------------------------------------

@dataclass(frozen=True)
class SemilinearSystem:
    """The system A v^q = v; ``prescale`` is the power of t that clears poles at 0."""

    field: FieldConfig
    A: tuple  # rows of RatFunc
    prescale: int | None = None

    def __post_init__(self):
        A = tuple(tuple(RatFunc(e) if isinstance(e, Poly) else e for e in row) for row in self.A)
        object.__setattr__(self, "A", A)
        n = len(A)
        if any(len(row) != n for row in A):
            raise ValueError("the system matrix must be square")
        for row in A:
            for e in row:
                self.field.check(e.field)
        if self.prescale is not None and self.prescale < 0:
            raise ValueError("prescale must be nonnegative")

    @classmethod
    def from_rows(cls, field: FieldConfig, rows, prescale: int | None = None):
        def lift(e):
            if isinstance(e, RatFunc):
                return e
            if isinstance(e, Poly):
                return RatFunc(e)
            return RatFunc.const(field, field.embed(int(e)))
        return cls(field, tuple(tuple(lift(e) for e in row) for row in rows), prescale)

    @property
    def n(self) -> int:
        return len(self.A)

    @property
    def needed_prescale(self) -> int:
        return max((e.pole_order() for row in self.A for e in row if e), default=0)

    @property
    def shift(self) -> int:
        """Effective prescaling exponent; a declared value must clear every pole."""
        need = self.needed_prescale
        if self.prescale is None:
            return need
        if self.prescale < need:
            raise PrescalingError(
                f"declared prescale t^{self.prescale} leaves a pole of order {need} at 0")
        return self.prescale

    def scaled_series(self, precision: int) -> list[list[TruncSeries]]:
        """t^s A as power series known modulo t^precision."""
        s = self.shift
        return [[e.to_series(precision, shift=s) if e else TruncSeries.zero(self.field, precision)
                 for e in row] for row in self.A]


def _vector(field: FieldConfig, v, D: int) -> list[TruncSeries]:
    return [x if isinstance(x, TruncSeries) else TruncSeries(field, list(x), D) for x in v]


def residual(S: SemilinearSystem, v, D: int) -> list[TruncSeries]:
    """t^s (A v^q - v) modulo t^(D + s), one series per row."""
    F = S.field
    s = S.shift
    W = D + s
    v = [x.truncate(D) for x in _vector(F, v, D)]
    if any(x.precision < D for x in v):
        raise ValueError(f"solution vector known below precision {D}")
    B = S.scaled_series(W)
    vq = [TruncSeries(F, x.frobenius().coeffs, W) for x in v]
    out = []
    for i in range(S.n):
        acc = TruncSeries.zero(F, W)
        for j in range(S.n):
            acc = acc + TruncSeries(F, (B[i][j] * vq[j]).coeffs, W)
        out.append(acc - TruncSeries(F, v[i].shift(s).coeffs, W))
    return out


def verify_solution(S: SemilinearSystem, v, D: int) -> bool:
    """A v^q - v = 0 modulo t^D (after clearing poles)."""
    return all(r.is_zero() for r in residual(S, v, D))


def _system_matrix(S: SemilinearSystem, D: int) -> np.ndarray:
    """Rows (i, l) for t^l in row i of the residual, columns (j, k) for v_j's t^k."""
    F = S.field
    n, s, q = S.n, S.shift, F.q
    W = D + s
    B = S.scaled_series(W)
    M = np.zeros((n * W, n * D), dtype=np.int64)
    minus_one = F.neg(1)
    for j in range(n):
        for k in range(D):
            col = j * D + k
            off = q * k
            if off < W:
                for i in range(n):
                    seg = B[i][j].coeffs[: W - off]
                    M[i * W + off: i * W + off + len(seg), col] = seg
            r = j * W + s + k
            M[r, col] = F.add(int(M[r, col]), minus_one)
    return M


def _split(field: FieldConfig, vec, n: int, D: int) -> list[TruncSeries]:
    return [TruncSeries(field, [int(c) for c in vec[j * D:(j + 1) * D]], D) for j in range(n)]


@dataclass
class SolutionBasis:
    vectors: list            # list of n-vectors of TruncSeries
    precision: int
    dims: list               # (precision, dimension) per probe
    n: int
    status: str = "stable"   # "stable" or "inconclusive"

    @property
    def dim(self) -> int:
        return len(self.vectors)

    @property
    def within_bound(self) -> bool:
        return self.dim <= self.n

    @property
    def conclusive(self) -> bool:
        return self.status == "stable" and self.within_bound


def solve_at(S: SemilinearSystem, D: int) -> list[list[TruncSeries]]:
    """Basis of the solutions modulo t^D, vectors truncated at t^D."""
    M = _system_matrix(S, D)
    return [_split(S.field, v, S.n, D) for v in nullspace(S.field, M, ncols=S.n * D)]


def solve_semilinear(S: SemilinearSystem, D: int = 256, W: int = 2) -> SolutionBasis:
    """Power series solutions of A v^q = v modulo t^D.

    The dimension is probed at D / 2^W, ..., D / 2, D and the answer is
    "stable" when all probes agree.  A dimension above n can only be a
    truncation artifact and is reported as inconclusive.
    """
    if D < 1:
        raise ValueError("precision must be positive")
    _ = S.shift  # raises on an insufficient declared prescale
    probes = sorted({max(1, D >> k) for k in range(W, -1, -1)})
    dims = []
    basis = []
    for P in probes:
        basis = solve_at(S, P)
        dims.append((P, len(basis)))
    stable = len({d for _, d in dims}) == 1
    status = "stable" if stable and len(basis) <= S.n else "inconclusive"
    return SolutionBasis(basis, D, dims, S.n, status)


def _coeff_matrix(vectors) -> np.ndarray:
    if not vectors:
        return np.zeros((0, 0), dtype=np.int64)
    return np.array([[c for x in v for c in x.coeffs] for v in vectors], dtype=np.int64)


def combine(field: FieldConfig, vectors, scalars) -> list[TruncSeries]:
    D = vectors[0][0].precision
    n = len(vectors[0])
    acc = [TruncSeries.zero(field, D) for _ in range(n)]
    for lam, v in zip(scalars, vectors):
        if lam:
            acc = [a + x.scale(lam) for a, x in zip(acc, v)]
    return acc


@dataclass
class FqStructureReport:
    dim: int
    independent: bool
    combinations_checked: int
    failures: list = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.independent and not self.failures


def fq_structure_check(S: SemilinearSystem, basis, D: int | None = None,
                       samples: int = 64, seed: int = 0) -> FqStructureReport:
    """Every F_q-combination of the basis solves the system; the basis is independent.

    All q^dim combinations are checked when there are at most ``samples`` of
    them, otherwise a seeded random selection.
    """
    vectors = basis.vectors if isinstance(basis, SolutionBasis) else list(basis)
    F = S.field
    if not vectors:
        return FqStructureReport(0, True, 0)
    if D is None:
        D = vectors[0][0].precision
    independent = rank(F, _coeff_matrix(vectors)) == len(vectors)
    q, k = F.q, len(vectors)
    if q ** k <= samples:
        combos = list(itertools.product(range(q), repeat=k))
    else:
        rng = random.Random(seed)
        combos = [tuple(rng.randrange(q) for _ in range(k)) for _ in range(samples)]
    failures = [lam for lam in combos if not verify_solution(S, combine(F, vectors, lam), D)]
    return FqStructureReport(k, independent, len(combos), failures)


def random_system(rng: random.Random, field: FieldConfig, n: int = 2, deg: int = 2) -> SemilinearSystem:
    """Random pole-free system with polynomial numerators and unit denominators."""
    def rpoly(d, unit=False):
        c = [rng.randrange(field.q) for _ in range(d + 1)]
        if unit:
            c[0] = rng.randrange(1, field.q)
        return Poly(field, c)
    rows = []
    for _ in range(n):
        rows.append(tuple(RatFunc(rpoly(deg), rpoly(rng.randrange(deg + 1), unit=True))
                          for _ in range(n)))
    return SemilinearSystem(field, tuple(rows))


# -- the e-system ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ESystemSpec:
    """Coefficients d[i][l][j-1] of c_i = sum_l sum_{j=1..N} d_{i,l,j} c_l^{q^j}."""

    field: FieldConfig
    r: int
    N: int
    d: tuple

    def __post_init__(self):
        if self.r < 1 or self.N < 1:
            raise ValueError("an e-system needs r >= 1 and N >= 1")
        if len(self.d) != self.r or any(len(row) != self.r for row in self.d) or any(
                len(cell) != self.N for row in self.d for cell in row):
            raise ValueError("the d table must be r x r x N")
        F = self.field

        def lift(e):
            if isinstance(e, RatFunc):
                return e
            if isinstance(e, Poly):
                return RatFunc(e)
            return RatFunc.const(F, F.embed(int(e)))
        d = tuple(tuple(tuple(lift(e) for e in cell) for cell in row) for row in self.d)
        object.__setattr__(self, "d", d)

    def entry(self, i: int, l: int, j: int) -> RatFunc:
        return self.d[i][l][j - 1]


def e_index(N: int, i: int, j: int) -> int:
    """Position of e_{i,j} (i from 0, j from 1) in the stacked unknown vector."""
    return i * N + (j - 1)


def build_e_system(spec: ESystemSpec, literal: bool = False) -> SemilinearSystem:
    """The rN x rN system e_{i,j} = e_{i,j+1}^q, e_{i,N} = sum d_{i,l,j} e_{l,N+1-j}^q.

    With ``literal`` the last block reads e_{l,N+1-i} instead, which only
    makes sense when r <= N.
    """
    F, r, N = spec.field, spec.r, spec.N
    zero = RatFunc.zero(F)
    one = RatFunc.one(F)
    n = r * N
    A = [[zero] * n for _ in range(n)]
    for i in range(r):
        for j in range(1, N):
            A[e_index(N, i, j)][e_index(N, i, j + 1)] = one
        row = e_index(N, i, N)
        for l in range(r):
            for j in range(1, N + 1):
                idx = N + 1 - (i + 1) if literal else N + 1 - j
                if not 1 <= idx <= N:
                    raise ValueError(f"literal index N+1-i = {idx} is out of range")
                col = e_index(N, l, idx)
                A[row][col] = A[row][col] + spec.entry(i, l, j)
    return SemilinearSystem(F, tuple(tuple(r_) for r_ in A))


def embed_solution(c: list[TruncSeries], N: int, D: int) -> list[TruncSeries]:
    """The stacked vector e_{i,j} = c_i^{q^(N-j)} modulo t^D."""
    out = []
    for ci in c:
        for j in range(1, N + 1):
            x = ci
            for _ in range(N - j):
                x = x.frobenius()
            out.append(TruncSeries(x.field, x.coeffs, D))
    return out


# -- representation data and the d table ----------------------------------------------------

def frobenius_table(Q, N: int) -> list:
    """R[j][i][k] with z_i^{q^j} = sum_k R[j][i][k] z_k, from z_i^q = sum_k Q[i][k] z_k."""
    r = len(Q)
    F = Q[0][0].field
    R = [[[RatFunc.one(F) if i == k else RatFunc.zero(F) for k in range(r)] for i in range(r)]]
    for _ in range(N):
        prev = R[-1]
        nxt = []
        for i in range(r):
            row = [RatFunc.zero(F)] * r
            for k in range(r):
                if not prev[i][k]:
                    continue
                fk = prev[i][k].frobenius()
                for l in range(r):
                    if Q[k][l]:
                        row[l] = row[l] + fk * Q[k][l]
            nxt.append(row)
        R.append(nxt)
    return R


def d_table(rel: OreRelation, Q) -> ESystemSpec:
    """d_{k,l,j} = -a_j R_{l,j,k} / a_0 for a homogeneous relation sum a_j x^{q^j} = 0."""
    if not rel.homogeneous:
        raise ValueError("the d table needs a homogeneous relation")
    F = rel.field
    N = rel.m
    if N < 1:
        raise ValueError("a relation a_0 x = 0 forces x = 0; nothing to solve")
    r = len(Q)
    R = frobenius_table(Q, N)
    a0 = RatFunc(rel.coeffs[0])
    d = []
    for k in range(r):
        row = []
        for l in range(r):
            row.append(tuple(-(RatFunc(rel.coeffs[j]) * R[j][l][k]) / a0 for j in range(1, N + 1)))
        d.append(tuple(row))
    return ESystemSpec(F, r, N, tuple(d))


# -- the guided pipeline --------------------------------------------------------------------

@dataclass
class PipelineResult:
    c_series: list           # TruncSeries per basis element
    c_polys: list            # annihilating polynomial per c_i (None for c_i = 0)
    c_machines: list         # msd-integer Dfao per c_i
    assembled: gps.GpsAutomaton
    solutions: SolutionBasis
    checked: int
    mismatches: list

    @property
    def ok(self) -> bool:
        return not self.mismatches


def _oracle(x):
    if isinstance(x, gps.GpsAutomaton):
        return x.coeff, float("inf")
    if isinstance(x, gps.TruncGps):
        return x.coeff, x.frontier
    if callable(x):
        return x, float("inf")
    raise TypeError("x must be a GpsAutomaton, a TruncGps or a coefficient function")


def _fraction_samples(basis, per: int = 12) -> list[Fraction]:
    fr = {Fraction(0)}
    for z in basis:
        res = gps.support_enum(z, bound=1, max_terms=per, budget=20_000)
        fr.update(res.exponents)
        for e in list(res.exponents):
            p = z.p
            fr.add(e + Fraction(1, p ** 8))
    return sorted(f for f in fr if f < 1)


def _series_to_machine(c: TruncSeries, p: int, dX: int, dt: int, budget: int):
    F = c.field
    if c.is_zero():
        return None, dfa.zero_machine(F, p, dfa.MSD_INTEGER)
    P = guess_relation(c, dX, dt)
    lsd = kernel_automaton(P, c, budget=budget)
    msd = dfa.reverse(lsd, semantics=dfa.MSD_INTEGER)
    if series_from_dfao(lsd, c.precision) != c:
        raise InconclusiveError("kernel automaton disagrees with the recovered series")
    return P, msd


def algebraic_to_automatic_pipeline(x, ore: OreRelation, basis, Q, *, D: int = 64,
                                    solve_precision: int | None = None, dX: int = 4,
                                    dt: int = 8, samples: int = 500, seed: int = 0,
                                    literal: bool = False, budget: int = 10_000,
                                    fraction_samples=None) -> PipelineResult:
    """Write x = sum_i c_i z_i with c_i in F_q[[t]] and turn each c_i into an automaton.

    ``basis`` lists the fractional series z_i, ``Q`` expresses z_i^q over
    them, and ``ore`` is a relation satisfied by x.  The e-system built from
    the relation is solved modulo t^solve_precision; the unique F_q
    combination of its solutions matching x on the samples n + f (n < D)
    gives the c_i.
    """
    basis = list(basis)
    if not basis:
        raise ValueError("the basis is empty")
    F = basis[0].field
    p = basis[0].p
    r = len(basis)
    for z in basis:
        ok, witness = gps.support_in_unit_interval(z)
        if not ok:
            from .errors import PreconditionError
            raise PreconditionError(f"basis element has support at {witness} >= 1", witness)
    Q = [[e if isinstance(e, RatFunc) else RatFunc(e) for e in row] for row in Q]
    coeff, bound = _oracle(x)
    rel = homogenize(ore)
    spec = d_table(rel, Q)
    S = build_e_system(spec, literal=literal)
    Dp = solve_precision or 2 * D
    sol = solve_semilinear(S, Dp)
    N = spec.N
    if bound != float("inf"):
        D = min(D, int(bound))

    fracs = sorted(fraction_samples) if fraction_samples is not None else _fraction_samples(basis)
    zval = [[z.coeff(f) for f in fracs] for z in basis]
    # linear system in the combination scalars: one row per sample n + f
    cols = []
    for v in sol.vectors:
        c = [v[e_index(N, i, N)] for i in range(r)]
        col = []
        for n in range(D):
            for fi in range(len(fracs)):
                acc = 0
                for i in range(r):
                    acc = F.add(acc, F.mul(c[i].coeff(n), zval[i][fi]))
                col.append(acc)
        cols.append(col)
    target = []
    for n in range(D):
        for f in fracs:
            e = n + f
            target.append(coeff(e) if e < bound else 0)
    rows = len(target)
    M = np.array(cols, dtype=np.int64).T if cols else np.zeros((rows, 0), dtype=np.int64)
    aug = np.hstack([M, np.array(target, dtype=np.int64).reshape(-1, 1)])
    R, piv = rref(F, aug)
    k = M.shape[1]
    if k in piv:
        raise InconclusiveError("no solution of the e-system matches x on the samples")
    if len(piv) < k:
        raise AmbiguityError(
            f"{F.q ** (k - len(piv))} solutions match x on the samples; raise the precision")
    lam = [0] * k
    for i, pc in enumerate(piv):
        lam[pc] = int(R[i, k])
    if k:
        e = combine(F, sol.vectors, lam)
        c_series = [e[e_index(N, i, N)].truncate(D) for i in range(r)]
    else:
        c_series = [TruncSeries.zero(F, D) for _ in range(r)]

    polys, machines = [], []
    for c in c_series:
        P, m = _series_to_machine(c, p, dX, dt, budget)
        polys.append(P)
        machines.append(m)
    assembled = gps.recombine(list(zip(machines, basis)), F, p)

    rng = random.Random(seed)
    pts = set()
    sup = gps.support_enum(assembled, bound=min(bound, D), max_terms=samples // 2, budget=50_000)
    pts.update(sup.exponents)
    max_int = max(0, min(D, int(min(bound, D))) - 1)
    while len(pts) < samples:
        e = gps.random_exponent(rng, p, max_int=max_int, max_digits=12)
        if e < bound:
            pts.add(e)
    mismatches = [e for e in sorted(pts) if assembled.coeff(e) != coeff(e)]
    return PipelineResult(c_series, polys, machines, assembled, sol, len(pts), mismatches)


# -- text formats ---------------------------------------------------------------------------

def _sparse(f: Poly) -> str:
    F = f.field
    toks = [f"{i}:{F.format(c)}" for i, c in enumerate(f.coeffs) if c]
    return " ".join(toks) if toks else "0"


def format_entry(e: RatFunc) -> str:
    if e.den.degree == 0 and e.den.coeffs == (1,):
        return _sparse(e.num)
    return f"{_sparse(e.num)} / {_sparse(e.den)}"


def _parse_entry(F: FieldConfig, text: str) -> RatFunc:
    try:
        return parse_ratfunc(F, text)
    except (ValueError, IndexError) as exc:
        raise FormatError(f"bad rational function {text!r}") from exc


def _lines(text: str) -> list[str]:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    return [ln for ln in lines if ln]


def system_to_text(S: SemilinearSystem) -> str:
    head = f"semilinear v1 {S.field.header()} n={S.n}"
    if S.prescale is not None:
        head += f" prescale={S.prescale}"
    out = [head]
    for i, row in enumerate(S.A):
        for j, e in enumerate(row):
            if e:
                out.append(f"{i} {j} : {format_entry(e)}")
    return "\n".join(out) + "\n"


def system_from_text(text: str) -> SemilinearSystem:
    from .dfao import parse_field_line

    lines = _lines(text)
    if not lines:
        raise FormatError("empty semilinear file")
    m = re.match(r"^semilinear v1 (field .*?) n=(\d+)(?: prescale=(\d+))?$", lines[0])
    if not m:
        raise FormatError("missing 'semilinear v1 field ... n=<dim>' header")
    F = parse_field_line(m.group(1))
    n = int(m.group(2))
    pre = int(m.group(3)) if m.group(3) is not None else None
    A = [[RatFunc.zero(F)] * n for _ in range(n)]
    for ln in lines[1:]:
        mm = re.match(r"^(\d+)\s+(\d+)\s*:\s*(.+)$", ln)
        if not mm:
            raise FormatError(f"bad matrix line {ln!r}")
        i, j = int(mm.group(1)), int(mm.group(2))
        if i >= n or j >= n:
            raise FormatError(f"entry ({i}, {j}) outside an {n} x {n} matrix")
        A[i][j] = _parse_entry(F, mm.group(3))
    return SemilinearSystem(F, tuple(tuple(r) for r in A), pre)


def espec_to_text(spec: ESystemSpec) -> str:
    out = [f"esystem v1 {spec.field.header()} r={spec.r} N={spec.N}"]
    for i in range(spec.r):
        for l in range(spec.r):
            for j in range(1, spec.N + 1):
                e = spec.entry(i, l, j)
                if e:
                    out.append(f"{i} {l} {j} : {format_entry(e)}")
    return "\n".join(out) + "\n"


def espec_from_text(text: str) -> ESystemSpec:
    from .dfao import parse_field_line

    lines = _lines(text)
    if not lines:
        raise FormatError("empty e-system file")
    m = re.match(r"^esystem v1 (field .*?) r=(\d+) N=(\d+)$", lines[0])
    if not m:
        raise FormatError("missing 'esystem v1 field ... r=.. N=..' header")
    F = parse_field_line(m.group(1))
    r, N = int(m.group(2)), int(m.group(3))
    d = [[[RatFunc.zero(F)] * N for _ in range(r)] for _ in range(r)]
    for ln in lines[1:]:
        mm = re.match(r"^(\d+)\s+(\d+)\s+(\d+)\s*:\s*(.+)$", ln)
        if not mm:
            raise FormatError(f"bad e-system line {ln!r}")
        i, l, j = int(mm.group(1)), int(mm.group(2)), int(mm.group(3))
        if i >= r or l >= r or not 1 <= j <= N:
            raise FormatError(f"index ({i}, {l}, {j}) out of range")
        d[i][l][j - 1] = _parse_entry(F, mm.group(4))
    return ESystemSpec(F, r, N, tuple(tuple(tuple(c) for c in row) for row in d))


def ore_to_text(rel: OreRelation) -> str:
    out = [f"ore v1 {rel.field.header()}"]
    for i, a in enumerate(rel.coeffs):
        if a:
            out.append(f"a {i} : {_sparse(a)}")
    if rel.g is not None and rel.g:
        out.append(f"g : {_sparse(rel.g)}")
    return "\n".join(out) + "\n"


def ore_from_text(text: str) -> OreRelation:
    from .dfao import parse_field_line

    lines = _lines(text)
    if not lines:
        raise FormatError("empty relation file")
    m = re.match(r"^ore v1 (field .*)$", lines[0])
    if not m:
        raise FormatError("missing 'ore v1 field ...' header")
    F = parse_field_line(m.group(1))
    coeffs: dict[int, Poly] = {}
    g = None
    for ln in lines[1:]:
        ma = re.match(r"^a\s+(\d+)\s*:\s*(.+)$", ln)
        mg = re.match(r"^g\s*:\s*(.+)$", ln)
        try:
            if ma:
                coeffs[int(ma.group(1))] = parse_poly(F, ma.group(2))
            elif mg:
                g = parse_poly(F, mg.group(1))
            else:
                raise FormatError(f"bad relation line {ln!r}")
        except ValueError as exc:
            raise FormatError(str(exc)) from exc
    if not coeffs:
        raise FormatError("relation has no coefficients")
    m_ = max(coeffs)
    try:
        return OreRelation(tuple(coeffs.get(i, Poly(F)) for i in range(m_ + 1)), g)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def vector_to_text(field: FieldConfig, v) -> str:
    D = v[0].precision if v else 0
    out = [f"vector v1 {field.header()} n={len(v)} precision={D}"]
    for x in v:
        out.append(_sparse(x.to_poly()))
    return "\n".join(out) + "\n"


def vector_from_text(text: str):
    from .dfao import parse_field_line

    lines = _lines(text)
    m = re.match(r"^vector v1 (field .*?) n=(\d+) precision=(\d+)$", lines[0]) if lines else None
    if not m:
        raise FormatError("missing 'vector v1 field ... n=.. precision=..' header")
    F = parse_field_line(m.group(1))
    n, D = int(m.group(2)), int(m.group(3))
    if len(lines) - 1 != n:
        raise FormatError(f"expected {n} series lines")
    out = []
    for ln in lines[1:]:
        f = parse_poly(F, ln)
        if f.degree >= D:
            raise FormatError("series term beyond the stated precision")
        out.append(TruncSeries.from_poly(f, D))
    return F, out


def staircase_basis_fixture(field: FieldConfig):
    """Basis (z, 1) with z = sum_{i>=1} t^(1-p^-i) and the matrix expressing z^q, 1^q.

    Valid for prime fields: z^p = t^(p-1) z + t^(p-1).
    """
    p = field.p
    if field.e != 1:
        raise ValueError("the staircase fixture is defined over prime fields")
    z = gps.staircase_machine(field, p)
    one = gps.unit_series(field, p)
    tp = RatFunc(Poly.monomial(field, p - 1))
    Q = [[tp, tp], [RatFunc.zero(field), RatFunc.one(field)]]
    return [z, one], Q
