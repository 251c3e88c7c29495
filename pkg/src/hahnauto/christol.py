"""Algebraic power series over F_q and their kernel automata.

Forward direction: a root x of an irreducible, separable P(t, X) lives in
the field K[X]/(P) with K = F_q(t).  Every element there splits as
sum_k c_k (x^k)^q with c_k in K, so the base-q Cartier operators act by
Lambda_r(u) = sum_k Lambda_r(c_k) x^k and the orbit of x is a finite set of
coordinate vectors.  Backward direction: guess a polynomial annihilating the
series of an automaton by exact linear algebra on its truncation.
"""

from __future__ import annotations

import warnings

from collections import deque
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import dfao as dfa
from .errors import (BoundsExceeded, BudgetExceeded, HahnautoError, InseparableError,
                     ReducibleError, UnderdeterminedError)
from .field import FieldConfig
from .linalg import nullspace, rf_inverse, rf_matvec, rf_solve
from .poly import BiPoly, Poly, RatFunc, TruncSeries, cartier, series_root


# -- arithmetic in F_q(t)[X]/(P) -----------------------------------------------------

def _kx_trim(a):
    a = list(a)
    while a and not a[-1]:
        a.pop()
    return a


def _kx_divmod(a, b):
    a = _kx_trim(a)
    b = _kx_trim(b)
    if not b:
        raise ZeroDivisionError("division by the zero polynomial")
    F = b[0].field
    quot = [RatFunc.zero(F)] * max(len(a) - len(b) + 1, 0)
    inv = b[-1].inv()
    while len(a) >= len(b):
        c = a[-1] * inv
        k = len(a) - len(b)
        quot[k] = c
        for i, bi in enumerate(b):
            if bi:
                a[k + i] = a[k + i] - c * bi
        a = _kx_trim(a[:-1])
    return quot, a


def _kx_gcd(a, b):
    a, b = _kx_trim(a), _kx_trim(b)
    while b:
        _, r = _kx_divmod(a, b)
        a, b = b, r
    if a:
        inv = a[-1].inv()
        a = [c * inv for c in a]
    return a


class QuotientRing:
    """K[X]/(P) for monic-ized P; elements are length-d tuples of RatFunc."""

    def __init__(self, P: BiPoly):
        F = P.field
        d = P.deg_x
        if d < 1:
            raise ValueError("need a polynomial of positive degree in X")
        self.field = F
        self.d = d
        lead = RatFunc(P.coeff(d))
        # X^d = -sum_j (p_j / p_d) X^j
        self.tail = [-(RatFunc(P.coeff(j)) / lead) for j in range(d)]

    def zero(self):
        return tuple(RatFunc.zero(self.field) for _ in range(self.d))

    def one(self):
        return self.basis(0)

    def basis(self, k):
        return tuple(RatFunc.one(self.field) if j == k else RatFunc.zero(self.field)
                     for j in range(self.d))

    def reduce(self, coeffs):
        a = list(coeffs) + [RatFunc.zero(self.field)] * max(self.d - len(coeffs), 0)
        for k in range(len(a) - 1, self.d - 1, -1):
            c = a[k]
            if c:
                for j, tj in enumerate(self.tail):
                    if tj:
                        a[k - self.d + j] = a[k - self.d + j] + c * tj
            a[k] = RatFunc.zero(self.field)
        return tuple(a[: self.d])

    def add(self, u, v):
        return tuple(a + b for a, b in zip(u, v))

    def scale(self, c: RatFunc, u):
        return tuple(c * a for a in u)

    def mul(self, u, v):
        out = [RatFunc.zero(self.field)] * (2 * self.d - 1)
        for i, a in enumerate(u):
            if a:
                for j, b in enumerate(v):
                    if b:
                        out[i + j] = out[i + j] + a * b
        return self.reduce(out)

    def x(self):
        return self.reduce([RatFunc.zero(self.field), RatFunc.one(self.field)])

    def power_of_x(self, n: int):
        """X^n mod P by square-and-multiply."""
        result = self.one()
        base = self.x()
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result


class KernelData:
    """Frobenius decomposition data for a root of P."""

    def __init__(self, P: BiPoly):
        self.P = P
        self.ring = R = QuotientRing(P)
        q = P.field.q
        # column k is X^{qk} mod P
        self.cols = [R.power_of_x(q * k) for k in range(R.d)]
        B = [[self.cols[k][j] for k in range(R.d)] for j in range(R.d)]
        try:
            self.Binv = rf_inverse(B)
        except ZeroDivisionError as exc:
            raise InseparableError("x is not a K-combination of q-th powers; P is inseparable") from exc

    def frobenius(self, u):
        """u^q = sum_j u_j^q X^{qj} mod P."""
        return tuple(rf_matvec([[self.cols[k][j] for k in range(self.ring.d)]
                                for j in range(self.ring.d)], [c.frobenius() for c in u]))

    def split(self, u):
        """Coefficients c_k with u = sum_k c_k (x^k)^q."""
        return rf_matvec(self.Binv, list(u))

    def cartier(self, u, r: int):
        return tuple(cartier(c, r) for c in self.split(u))


def check_polynomial(P: BiPoly):
    """Reject polynomials that are inseparable or visibly reducible over F_q(t)."""
    if P.deg_x < 1:
        raise ValueError("P must have positive degree in X")
    dP = P.derivative()
    if dP.is_zero():
        raise InseparableError("dP/dX vanishes identically")
    if P.deg_x == 1:
        return
    if not P.coeff(0):
        raise ReducibleError("P is divisible by X", factor=BiPoly(P.field, [Poly(P.field), Poly.const(P.field, 1)]))
    a = [RatFunc(c) for c in P.coeffs]
    b = [RatFunc(c) for c in dP.coeffs]
    g = _kx_gcd(a, b)
    if len(g) > 1:
        raise ReducibleError("P has a repeated factor", factor=g)
    # a common factor of all t-coefficients is a factor in F_q[t]
    content = P.coeffs[0]
    for c in P.coeffs[1:]:
        content = content.gcd(c) if c else content
    if content.degree > 0:
        raise ReducibleError("P has a factor in F_q[t]", factor=content)


class RootSeries:
    """Cached power series expansion of the root pinned by a prefix."""

    def __init__(self, P: BiPoly, prefix: TruncSeries):
        self.P = P
        self.series = series_root(P, prefix, max(prefix.precision, 16))

    def get(self, precision: int) -> TruncSeries:
        if precision > self.series.precision:
            n = max(precision, 2 * self.series.precision)
            self.series = series_root(self.P, self.series, n)
        return self.series.truncate(precision)


def element_series(u, root: RootSeries, precision: int) -> TruncSeries:
    """Power series of sum_j u_j x^j (which must have no pole at 0)."""
    F = root.P.field
    v = max((c.pole_order() for c in u if c), default=0)
    n = precision + v
    x = root.get(n)
    acc = TruncSeries.zero(F, n)
    xp = TruncSeries(F, [1], n)
    for c in u:
        if c:
            acc = acc + (c.to_series(n, shift=v) * xp).truncate(n)
        xp = (xp * x).truncate(n)
    return acc.shift(-v)


def element_constant(u, root: RootSeries) -> int:
    return element_series(u, root, 1).coeff(0)


# -- the kernel automaton ----------------------------------------------------------------

@dataclass
class KernelClosure:
    states: list  # coordinate tuples; index 0 is x
    trans: list   # trans[s][r]
    outputs: list
    data: KernelData = dc_field(repr=False)
    root: RootSeries = dc_field(repr=False)


def kernel_closure(P: BiPoly, prefix: TruncSeries, budget: int = 10_000) -> KernelClosure:
    check_polynomial(P)
    F = P.field
    root = RootSeries(P, prefix)
    data = KernelData(P)
    x = data.ring.x()
    index = {x: 0}
    states = [x]
    trans = []
    queue = deque([x])
    while queue:
        u = queue.popleft()
        row = []
        for r in range(F.q):
            w = data.cartier(u, r)
            j = index.get(w)
            if j is None:
                j = len(states)
                if j >= budget:
                    raise BudgetExceeded(f"kernel closure exceeded {budget} states", explored=j)
                index[w] = j
                states.append(w)
                queue.append(w)
            row.append(j)
        trans.append(row)
    outputs = [element_constant(u, root) for u in states]
    return KernelClosure(states, trans, outputs, data, root)


def kernel_automaton(P: BiPoly, prefix: TruncSeries, budget: int = 10_000) -> dfa.Dfao:
    """LSD automaton over base p whose output on the digits of n is x_n."""
    K = kernel_closure(P, prefix, budget)
    F = P.field
    A = dfa.Dfao(F, F.q, False, dfa.LSD_INTEGER, 0, tuple(K.outputs),
                 tuple(tuple(r) for r in K.trans))
    A = dfa.block_recode(A, F.p)
    A = dfa.zero_normalize(A, "pad-invariant")
    return dfa.minimize(A)


# -- Ore relations ----------------------------------------------------------------------------

@dataclass(frozen=True)
class OreRelation:
    """sum_{i=0}^m a_i x^{q^i} + g = 0 with polynomial a_i and a_0 != 0."""

    coeffs: tuple  # a_0 .. a_m as Poly
    g: Poly | None = None

    def __post_init__(self):
        if not self.coeffs or not self.coeffs[0]:
            raise ValueError("an Ore relation needs a_0 != 0")

    @property
    def m(self) -> int:
        return len(self.coeffs) - 1

    @property
    def field(self) -> FieldConfig:
        return self.coeffs[0].field

    @property
    def homogeneous(self) -> bool:
        return self.g is None or not self.g

    def residual(self, x: TruncSeries) -> TruncSeries:
        q = self.field.q
        acc = TruncSeries.zero(self.field, x.precision)
        xi = x
        for a in self.coeffs:
            acc = acc + a * xi
            xi = xi.frobenius()
        if self.g is not None:
            acc = acc + self.g
        return acc


def homogenize(rel: OreRelation) -> OreRelation:
    """Remove g using the q-th power of the relation: g^q R - g R^q = 0."""
    if rel.homogeneous:
        return rel
    g = rel.g
    gq = g.frobenius()
    F = rel.field
    m = rel.m
    out = [Poly(F)] * (m + 2)
    for i, a in enumerate(rel.coeffs):
        out[i] = out[i] + gq * a
        out[i + 1] = out[i + 1] - g * a.frobenius()
    return OreRelation(tuple(out))


def ore_relation(P: BiPoly, prefix: TruncSeries | None = None) -> OreRelation:
    """A relation sum a_i x^{q^i} + g = 0 for the roots of P, with smallest m.

    Polynomial solutions with a_0 = 1 are preferred (homogeneous first, then
    with a constant term g); otherwise denominators are cleared, which keeps
    a_0 != 0.  The relation is checked by exact reduction modulo P.
    """
    check_polynomial(P)
    F = P.field
    data = KernelData(P)
    R = data.ring
    x = R.x()
    one = R.one()
    powers = []  # x^{q^i}, i = 1..
    cur = x
    fallback = None
    for m in range(0, R.d + 1):
        if m > 0:
            cur = data.frobenius(cur)
            powers.append(cur)
            sol = rf_solve([list(p) for p in powers], list(x))
            if sol is not None:
                if all(b.is_polynomial() for b in sol):
                    rel = OreRelation(tuple([Poly.const(F, 1)] + [-b.num for b in sol]))
                    return _verified(rel, data, x)
                if fallback is None:
                    fallback = _cleared(sol, None, F)
        sol = rf_solve([list(p) for p in powers] + [list(one)], list(x))
        if sol is not None:
            if all(b.is_polynomial() for b in sol):
                rel = OreRelation(tuple([Poly.const(F, 1)] + [-b.num for b in sol[:-1]]),
                                  g=-sol[-1].num)
                return _verified(rel, data, x)
            if fallback is None:
                fallback = _cleared(sol[:-1], sol[-1], F)
    if fallback is None:
        raise HahnautoError("x never entered the span of its q-power iterates")
    return _verified(fallback, data, x)


def _cleared(sol, gsol, F):
    L = Poly.const(F, 1)
    for b in list(sol) + ([gsol] if gsol is not None else []):
        L = L * b.den // L.gcd(b.den)
    coeffs = [L] + [-(b * L).num for b in sol]
    g = None if gsol is None else -(gsol * L).num
    return OreRelation(tuple(coeffs), g=g)


def _verified(rel: OreRelation, data: KernelData, x) -> OreRelation:
    R = data.ring
    acc = R.zero()
    cur = x
    for a in rel.coeffs:
        acc = R.add(acc, R.scale(RatFunc(a), cur))
        cur = data.frobenius(cur)
    if rel.g is not None:
        acc = R.add(acc, R.scale(RatFunc(rel.g), R.one()))
    if any(acc):
        raise HahnautoError("internal error: Ore relation does not reduce to zero mod P")
    return rel


# -- automaton -> polynomial ------------------------------------------------------------------

def series_from_dfao(A: dfa.Dfao, D: int) -> TruncSeries:
    """Coefficient n is the output on the canonical digits of n, n < D."""
    if A.semantics not in (dfa.LSD_INTEGER, dfa.MSD_INTEGER):
        raise dfa.IncompatibleError("series_from_dfao needs integer semantics")
    n = np.arange(D, dtype=np.int64)
    state = np.full(D, A.initial, dtype=np.int64)
    T = np.array(A.trans, dtype=np.int64)
    L = 0
    while A.base ** L < max(D, 1):
        L += 1
    positions = range(L) if A.semantics == dfa.LSD_INTEGER else range(L - 1, -1, -1)
    for pos in positions:
        bp = A.base ** pos
        digit = (n // bp) % A.base
        active = n >= bp
        state = np.where(active, T[state, digit], state)
    out = np.array(A.outputs, dtype=np.int64)[state]
    return TruncSeries(A.field, out.tolist(), D)


@dataclass(frozen=True)
class GuessResult:
    P: BiPoly
    precision: int
    status: str = "verified to precision"


def _relation_matrix(f: TruncSeries, dX: int, dt: int, D: int):
    F = f.field
    cols = []
    fj = TruncSeries(F, [1], D)
    for j in range(dX + 1):
        for k in range(dt + 1):
            cols.append(np.array(fj.shift(k).truncate(D).coeffs, dtype=np.int64))
        fj = (fj * f).truncate(D)
    return np.stack(cols, axis=1)


def _nullvec(f, dX, dt, D):
    if D <= (dX + 1) * (dt + 1):
        raise UnderdeterminedError(
            f"precision {D} does not exceed the {(dX + 1) * (dt + 1)} unknowns")
    M = _relation_matrix(f, dX, dt, D)
    ns = nullspace(f.field, M)
    return ns


def _to_bipoly(F, v, dX, dt):
    return BiPoly(F, [Poly(F, v[j * (dt + 1):(j + 1) * (dt + 1)].tolist())
                      for j in range(dX + 1)])


def guess_relation(f: TruncSeries, dX: int, dt: int, D: int | None = None) -> BiPoly:
    """Nonzero P, deg_X <= dX and deg_t <= dt, with P(t, f) = 0 mod t^D.

    Minimal X-degree first, then minimal t-degree.
    """
    F = f.field
    D = f.precision if D is None else min(D, f.precision)
    profile = []
    for X in range(1, dX + 1):
        ns = _nullvec(f, X, dt, D)
        profile.append((X, dt, (X + 1) * (dt + 1) - len(ns)))
        if not ns:
            continue
        for T in range(0, dt + 1):
            nsT = ns if T == dt else _nullvec(f, X, T, D)
            if nsT:
                return _to_bipoly(F, nsT[0], X, T).monic_normalized()
    raise BoundsExceeded(f"no relation with deg_X <= {dX}, deg_t <= {dt} modulo t^{D}",
                         rank_profile=profile)


def automaton_to_polynomial(A: dfa.Dfao, dX: int, dt: int, D: int) -> GuessResult:
    f = series_from_dfao(A, D)
    P = guess_relation(f, dX, dt, D)
    if not P(f).is_zero():
        raise HahnautoError("internal error: guessed relation fails its own check")
    return GuessResult(P, D)


def reduce_to_polynomial(a: list[TruncSeries], x: TruncSeries, Db: int,
                         precision: int | None = None) -> list[Poly]:
    """Polynomial b_j (deg <= Db), not all zero, with sum_j b_j x^j = 0 mod t^precision.

    The series coefficients a_j only fix the X-degree; their relation is
    checked at the working precision.
    """
    precision = x.precision if precision is None else min(precision, x.precision)
    F = x.field
    acc = TruncSeries.zero(F, precision)
    xj = TruncSeries(F, [1], precision)
    for aj in a:
        acc = acc + (aj * xj).truncate(precision)
        xj = (xj * x).truncate(precision)
    if not acc.truncate(min(acc.precision, precision)).is_zero():
        raise ValueError("the series coefficients do not annihilate x at this precision")
    J = len(a) - 1
    ns = _nullvec(x.truncate(precision), J, Db, precision)
    if not ns:
        raise BoundsExceeded(f"no polynomial relation with degree <= {Db}")
    P = _to_bipoly(F, ns[0], J, Db).monic_normalized()
    return [P.coeff(j) for j in range(J + 1)]


def leading_prefix(P: BiPoly, prefix_text: str | None, F: FieldConfig) -> TruncSeries:
    """Default prefix: the smallest constant term c with P(c) = 0 and P'(c) != 0 at t = 0."""
    from .poly import parse_poly

    if prefix_text:
        f = parse_poly(F, prefix_text)
        n = max(f.degree + 1, 1) if f else 1
        return TruncSeries.from_poly(f, n)
    cands = []
    for c in range(F.q):
        x = TruncSeries(F, [c], 1)
        if P(x).coeff(0) == 0 and P.derivative()(x).coeff(0) != 0:
            cands.append(x)
    if not cands:
        raise InseparableError(
            "cannot pick the root from its constant term; supply a longer prefix")
    if len(cands) > 1:
        warnings.warn(f"{len(cands)} roots differ in their constant term; using constant "
                      f"{F.format(cands[0].coeff(0))}", RuntimeWarning, stacklevel=2)
    return cands[0]


__all__ = [
    "QuotientRing", "KernelData", "KernelClosure", "kernel_closure", "kernel_automaton",
    "OreRelation", "ore_relation", "homogenize", "series_from_dfao", "guess_relation",
    "automaton_to_polynomial", "reduce_to_polynomial", "element_series", "check_polynomial",
    "leading_prefix", "GuessResult", "RootSeries",
]
