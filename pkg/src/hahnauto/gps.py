"""Generalized power series with exponents in Z[1/p]_{>=0}.

Two representations: ``GpsAutomaton`` (a radix automaton read on canonical
base-p strings of exponents) and ``TruncGps`` (finitely many terms below a
frontier).  The first handles supports with accumulation points; the
second supports ordinary ring arithmetic.
"""

from __future__ import annotations

import math
import random
import re
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

from . import dfao as dfa
from .digits import PAdicRational, canon_string, format_exponent, p_power_exponent, parse_exponent
from .errors import AccumulationError, DomainError, FormatError, PreconditionError
from .field import FieldConfig
from .poly import BiPoly, Poly

DOT = dfa.RADIX


@dataclass(frozen=True)
class GpsAutomaton:
    """Coefficient function r -> x_r given by a canonical-zero radix machine."""

    machine: dfa.Dfao

    def __post_init__(self):
        A = self.machine
        if not A.radix or A.semantics != dfa.MSD_RADIX:
            raise dfa.IncompatibleError("a series automaton reads radix strings (msd-radix)")

    @classmethod
    def from_dfao(cls, A: dfa.Dfao) -> "GpsAutomaton":
        """Normalize so that non-canonical strings output 0."""
        return cls(dfa.minimize(dfa.zero_normalize(A, "canonical-zero")))

    @property
    def field(self) -> FieldConfig:
        return self.machine.field

    @property
    def p(self) -> int:
        return self.machine.base

    def coeff(self, r) -> int:
        return self.machine.run(canon_string(PAdicRational.of(r, self.p), self.p).symbols())

    def __call__(self, r) -> int:
        return self.coeff(r)

    @property
    def nstates(self) -> int:
        return self.machine.nstates


def zero_series(field: FieldConfig, p: int | None = None) -> GpsAutomaton:
    p = field.p if p is None else p
    return GpsAutomaton(dfa.constant(field, p, 0, dfa.MSD_RADIX))


def staircase_machine(field: FieldConfig, p: int | None = None, value: int = 1) -> GpsAutomaton:
    """The series sum_{i>=1} t^{1 - p^-i}: exponents .(p-1)(p-1)...(p-1)."""
    p = field.p if p is None else p
    top = p - 1
    # 0 start, 1 after point, 2 inside the run, 3 dead
    rows = [
        [3] * p + [1],
        [2 if d == top else 3 for d in range(p)] + [3],
        [2 if d == top else 3 for d in range(p)] + [3],
        [3] * (p + 1),
    ]
    A = dfa.Dfao(field, p, True, dfa.MSD_RADIX, 0, (0, 0, value, 0),
                 tuple(tuple(r) for r in rows))
    return GpsAutomaton.from_dfao(A)


def unit_series(field: FieldConfig, p: int | None = None) -> GpsAutomaton:
    """The series 1 (support {0}, read as the string ".")."""
    p = field.p if p is None else p
    rows = ((2,) * p + (1,), (2,) * (p + 1), (2,) * (p + 1))
    return GpsAutomaton(dfa.Dfao(field, p, True, dfa.MSD_RADIX, 0, (0, 1, 0), rows))


def integer_series_machine(A: dfa.Dfao) -> GpsAutomaton:
    """Ordinary power series (MSD-integer machine) viewed as a generalized one."""
    return mul_int_frac(A, unit_series(A.field, A.base))


# -- support enumeration ---------------------------------------------------------------------

@dataclass(frozen=True)
class SupportResult:
    exponents: tuple[Fraction, ...]
    complete: bool  # False when the step budget ran out first
    steps: int
    warning: str | None = None


def _digit_live(A: dfa.Dfao) -> set[int]:
    return dfa.live_states(A, symbols=range(A.base))


def support_enum(x: GpsAutomaton, bound=math.inf, max_terms: int = 100,
                 budget: int = 100_000) -> SupportResult:
    """First support elements below ``bound``, in increasing order.

    Integer parts are visited by length, then lexicographically; for each,
    fractional digit strings are explored depth first with smaller digits
    first, which visits canonical strings in numeric order.  Prefixes whose
    state cannot reach a nonzero output are pruned.
    """
    A = x.machine
    p = A.base
    bound = bound if bound == math.inf else Fraction(bound)
    frac_live = _digit_live(A)
    # states from which digits, then the point, can reach frac_live
    dot_ok = {s for s in range(A.nstates) if A.trans[s][p] in frac_live}
    int_live = set(dot_ok)
    changed = True
    while changed:
        changed = False
        for s in range(A.nstates):
            if s not in int_live and any(A.trans[s][d] in int_live for d in range(p)):
                int_live.add(s)
                changed = True
    out: list[Fraction] = []
    steps = 0

    def exhausted():
        return steps >= budget

    def frac_dfs(state, n, depth, value):
        """Emit support points n + value + ... below the bound; return False to stop."""
        nonlocal steps
        stack = [(state, depth, value, True)]
        while stack:
            s, k, val, emit = stack.pop()
            steps += 1
            if exhausted():
                return False
            r = n + val
            if r >= bound:
                return False
            if emit and A.outputs[s]:
                out.append(r)
                if len(out) >= max_terms:
                    return False
            w = Fraction(1, p ** (k + 1))
            for d in range(p - 1, -1, -1):
                t = A.trans[s][d]
                if t in frac_live:
                    stack.append((t, k + 1, val + d * w, d != 0))
        return True

    def visit_integer(state, n):
        s = A.trans[state][p]
        if s in frac_live:
            return frac_dfs(s, n, 0, Fraction(0))
        return True

    level = {A.initial}  # states after canonical integer strings of the current length
    length = 0
    while True:
        if length == 0:
            if A.initial in int_live and not visit_integer(A.initial, 0):
                return _result(out, steps, budget, max_terms)
        else:
            # canonical strings of this length start with a nonzero digit
            stack = [(A.trans[A.initial][d], d, 1) for d in range(p - 1, 0, -1)]
            while stack:
                s, n, k = stack.pop()
                steps += 1
                if exhausted():
                    return _result(out, steps, budget, max_terms)
                if s not in int_live:
                    continue
                if k == length:
                    if n >= bound or not visit_integer(s, n):
                        return _result(out, steps, budget, max_terms)
                    continue
                for d in range(p - 1, -1, -1):
                    stack.append((A.trans[s][d], n * p + d, k + 1))
        digits = range(1, p) if length == 0 else range(p)
        level = {A.trans[s][d] for s in level for d in digits}
        if not level & int_live or p**length >= bound:
            break
        length += 1
    return SupportResult(tuple(out), True, steps)


def _result(out, steps, budget, max_terms):
    if steps >= budget and len(out) < max_terms:
        msg = f"support enumeration stopped after {steps} steps with {len(out)} terms"
        warnings.warn(msg, RuntimeWarning, stacklevel=3)
        return SupportResult(tuple(out), False, steps, msg)
    return SupportResult(tuple(out), True, steps)


# -- pointwise constructions ---------------------------------------------------------------

def add(x: GpsAutomaton, y: GpsAutomaton) -> GpsAutomaton:
    return GpsAutomaton(dfa.minimize(dfa.product(x.machine, y.machine, "add")))


def scalar_multiple(x: GpsAutomaton, c: int) -> GpsAutomaton:
    F = x.field
    return GpsAutomaton(dfa.minimize(dfa.map_outputs(x.machine, lambda o: F.mul(c, o))))


def frobenius_power(x: GpsAutomaton, i: int) -> GpsAutomaton:
    """Outputs raised to the q^i-th power (the identity on F_q values)."""
    F = x.field
    n = F.q ** i
    return GpsAutomaton(dfa.map_outputs(x.machine, lambda o: F.pow(o, n)))


def exponent_scale_pk(x: GpsAutomaton, k: int) -> GpsAutomaton:
    """Series with coeff(result, r) = coeff(x, r / p^k), i.e. exponents times p^k."""
    A = x.machine
    p = A.base
    T, f = A.trans, A.outputs
    if k == 0:
        return x
    DEAD = ("dead",)

    if k > 0:
        # integer digits are delayed through a k-digit buffer; at the point the
        # buffer becomes the start of the fractional part
        def feed_frac(xs, out, digits):
            for d in digits:
                xs = T[xs][d]
                if d:
                    out = f[xs]
            return xs, out

        def step(st, a):
            if st == DEAD:
                return DEAD
            if st[0] == "I":
                _, xs, buf = st
                if a == p:
                    xs1 = T[xs][p]
                    pad = (0,) * (k - len(buf))
                    xs1, out = feed_frac(xs1, f[xs1], pad + buf)
                    return ("F", xs1, out)
                if len(buf) == k:
                    return ("I", T[xs][buf[0]], buf[1:] + (a,))
                return ("I", xs, buf + (a,))
            _, xs, out = st
            if a == p:
                return DEAD
            xs, out = feed_frac(xs, out, (a,))
            return ("F", xs, out)

        def output(st):
            return st[2] if st[0] == "F" else 0

        start = ("I", A.initial, ())
    else:
        j = -k

        def dot_output(xs, started, remaining):
            if started:
                for _ in range(remaining):
                    xs = T[xs][0]
            return f[T[xs][p]]

        def step(st, a):
            if st == DEAD:
                return DEAD
            tag = st[0]
            if tag == "I":
                _, xs = st
                if a == p:
                    return ("M", xs, 0, xs != A.initial) if j else ("F", T[xs][p], f[T[xs][p]])
                return ("I", T[xs][a])
            if tag == "M":
                _, xs, cnt, started = st
                if a == p:
                    return DEAD
                if a or started:
                    xs = T[xs][a]
                    started = True
                cnt += 1
                if cnt == j:
                    xs1 = T[xs][p]
                    return ("F", xs1, f[xs1])
                return ("M", xs, cnt, started)
            _, xs, out = st
            if a == p:
                return DEAD
            xs = T[xs][a]
            return ("F", xs, f[xs] if a else out)

        def output(st):
            if st == DEAD or st[0] == "I":
                return 0
            if st[0] == "M":
                return dot_output(st[1], st[3], j - st[2])
            return st[2]

        start = ("I", A.initial)
    B = dfa.explore(A.field, p, True, dfa.MSD_RADIX, start, step, output)
    return GpsAutomaton.from_dfao(B)


def support_in_unit_interval(z: GpsAutomaton):
    """(True, None) if every support point is < 1, else (False, witness exponent)."""
    A = z.machine
    p = A.base
    for d in range(1, p):
        s = A.trans[A.initial][d]
        path = dfa.shortest_path(A, s, lambda u: A.outputs[u] != 0)
        if path is not None:
            syms = [d] + path
            text = "".join("." if a == p else format(a, "x") if p <= 16 else str(a) for a in syms)
            from .digits import parse_string

            return False, parse_string(text, p).value
    return True, None


def mul_int_frac(c: dfa.Dfao, z: GpsAutomaton) -> GpsAutomaton:
    """coeff(result, n + f) = c_n * z_f for integers n and f in [0, 1)."""
    if c.semantics != dfa.MSD_INTEGER:
        raise dfa.IncompatibleError("the integer factor must be an msd-integer machine")
    c.field.check(z.field)
    if c.base != z.p:
        raise dfa.IncompatibleError("digit bases differ")
    ok, witness = support_in_unit_interval(z)
    if not ok:
        raise PreconditionError(f"fractional factor has support at {witness} >= 1", witness)
    F = c.field
    p = c.base
    Z = z.machine
    z_dot = Z.trans[Z.initial][p]

    def step(st, a):
        if st[0] == "I":
            if a == p:
                return ("Z", c.outputs[st[1]], z_dot)
            return ("I", c.trans[st[1]][a])
        _, scal, zs = st
        return ("Z", scal, Z.trans[zs][a])

    def output(st):
        if st[0] == "I":
            return 0
        return F.mul(st[1], Z.outputs[st[2]])

    B = dfa.explore(F, p, True, dfa.MSD_RADIX, ("I", c.initial), step, output)
    return GpsAutomaton.from_dfao(B)


def _canonical_int_states(A: dfa.Dfao) -> list[int]:
    """States reached by canonical integer digit strings (no leading zero), BFS order."""
    p = A.base
    seen = [A.initial]
    seen_set = {A.initial}
    queue = [A.trans[A.initial][d] for d in range(1, p)]
    i = 0
    while i < len(queue):
        s = queue[i]
        i += 1
        if s in seen_set:
            continue
        seen_set.add(s)
        seen.append(s)
        queue.extend(A.trans[s][d] for d in range(p))
    return seen


def decompose(x: GpsAutomaton) -> list[tuple[dfa.Dfao, GpsAutomaton]]:
    """Pairs (x_j, z_j) with coeff(x, n + f) = sum_j x_j(n) z_j(f)."""
    A = x.machine
    p = A.base
    F = A.field
    live = dfa.live_states(A)
    dot_states: list[int] = []
    for s in _canonical_int_states(A):
        d = A.trans[s][p]
        if d in live and d not in dot_states:
            dot_states.append(d)
    int_trans = tuple(tuple(A.trans[s][:p]) for s in range(A.nstates))
    pairs = []
    for d in dot_states:
        ind = tuple(1 if A.trans[s][p] == d else 0 for s in range(A.nstates))
        xj = dfa.Dfao(F, p, False, dfa.MSD_INTEGER, A.initial, ind, int_trans)
        xj = dfa.minimize(dfa.zero_normalize(xj, "canonical-zero"))
        # fractional machine: a fresh start whose point leads to d
        n = A.nstates
        trans = [list(r) for r in A.trans] + [[n + 1] * p + [d], [n + 1] * (p + 1)]
        zj = dfa.Dfao(F, p, True, dfa.MSD_RADIX, n, A.outputs + (0, 0),
                      tuple(tuple(r) for r in trans))
        pairs.append((xj, GpsAutomaton.from_dfao(zj)))
    if not pairs:
        pairs.append((dfa.zero_machine(F, p, dfa.MSD_INTEGER), zero_series(F, p)))
    return pairs


def recombine(pairs, field: FieldConfig | None = None, p: int | None = None) -> GpsAutomaton:
    pairs = list(pairs)
    if not pairs:
        if field is None:
            raise ValueError("recombine of no pairs needs the field")
        return zero_series(field, p)
    acc = None
    for c, z in pairs:
        term = mul_int_frac(c, z)
        acc = term if acc is None else add(acc, term)
    return acc


# -- Ore forms and pointwise verification -----------------------------------------------------

@dataclass(frozen=True)
class OreForm:
    """sum_i a_i x^{q^i} + g = 0 given as (i, a_i) terms."""

    terms: tuple  # ((i, Poly), ...)
    g: Poly | None = None

    def __post_init__(self):
        if not any(a for _, a in self.terms):
            raise ValueError("an Ore form needs a nonzero coefficient")

    @classmethod
    def from_relation(cls, rel) -> "OreForm":
        return cls(tuple((i, a) for i, a in enumerate(rel.coeffs) if a), rel.g)


@dataclass(frozen=True)
class OreReport:
    residues: tuple  # (exponent, residue code)

    @property
    def ok(self) -> bool:
        return all(r == 0 for _, r in self.residues)

    @property
    def failures(self):
        return [(e, r) for e, r in self.residues if r]


def ore_residue(coeff: Callable, form: OreForm, e, field: FieldConfig, p: int) -> int:
    e = Fraction(PAdicRational.of(e, p).value)
    F = field
    acc = 0
    for i, a in form.terms:
        qi = F.q ** i
        for k, ak in enumerate(a.coeffs):
            if not ak:
                continue
            r = (e - k) / qi
            if r < 0:
                continue
            c = coeff(r)
            if c:
                acc = F.add(acc, F.mul(ak, F.pow(c, qi)))
    if form.g is not None and e.denominator == 1:
        acc = F.add(acc, form.g.coeff(int(e)))
    return acc


def verify_ore_pointwise(x: GpsAutomaton, form: OreForm, samples: Iterable) -> OreReport:
    out = []
    for e in samples:
        out.append((Fraction(PAdicRational.of(e, x.p).value),
                    ore_residue(x.coeff, form, e, x.field, x.p)))
    return OreReport(tuple(out))


def random_exponent(rng: random.Random, p: int, max_int: int = 4, max_digits: int = 12) -> Fraction:
    k = rng.randrange(max_digits + 1)
    return Fraction(rng.randrange(max_int * p**k + 1), p**k)


# -- truncated series -------------------------------------------------------------------------

class TruncGps:
    """Finitely many terms known exactly below ``frontier`` (math.inf = exact)."""

    __slots__ = ("field", "terms", "frontier")

    def __init__(self, field: FieldConfig, terms, frontier=math.inf):
        fr = frontier if frontier == math.inf else Fraction(frontier)
        acc: dict[Fraction, int] = {}
        items = terms.items() if isinstance(terms, dict) else terms
        for e, c in items:
            e = Fraction(e)
            if e < 0:
                raise DomainError(f"negative exponent {e}")
            if e >= fr:
                continue
            acc[e] = field.add(acc.get(e, 0), c)
        self.field = field
        self.terms = tuple(sorted((e, c) for e, c in acc.items() if c))
        self.frontier = fr

    @classmethod
    def from_poly(cls, f: Poly, frontier=math.inf):
        return cls(f.field, [(k, c) for k, c in enumerate(f.coeffs) if c], frontier)

    @classmethod
    def monomial(cls, field, e, c=1, frontier=math.inf):
        return cls(field, [(e, c)], frontier)

    @property
    def valuation(self):
        return self.terms[0][0] if self.terms else math.inf

    def coeff(self, e) -> int:
        e = Fraction(e)
        if e >= self.frontier:
            raise ValueError(f"exponent {e} is beyond the frontier {self.frontier}")
        for ex, c in self.terms:
            if ex == e:
                return c
        return 0

    @property
    def automaton_representable(self) -> bool:
        p = self.field.p
        return all(p_power_exponent(e.denominator, p) is not None for e, _ in self.terms)

    def _lift(self, other):
        if isinstance(other, TruncGps):
            self.field.check(other.field)
            return other
        if isinstance(other, Poly):
            return TruncGps.from_poly(other)
        if isinstance(other, int):
            return TruncGps(self.field, [(0, self.field.embed(other))])
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        fr = min(self.frontier, other.frontier)
        return TruncGps(self.field, list(self.terms) + list(other.terms), fr)

    __radd__ = __add__

    def __neg__(self):
        F = self.field
        return TruncGps(F, [(e, F.neg(c)) for e, c in self.terms], self.frontier)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        F = self.field
        # an unknown term of x at or beyond Bx meets y's lowest term at Bx + v(y)
        fr = min(_fadd(self.frontier, other.valuation), _fadd(other.frontier, self.valuation))
        acc = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = e1 + e2
                if e < fr:
                    acc[e] = F.add(acc.get(e, 0), F.mul(c1, c2))
        return TruncGps(F, acc, fr)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = TruncGps(self.field, [(0, 1)])
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale_exponents(self, m) -> "TruncGps":
        m = Fraction(m)
        if m <= 0:
            raise DomainError("exponent scaling factor must be positive")
        fr = self.frontier if self.frontier == math.inf else self.frontier * m
        return TruncGps(self.field, [(e * m, c) for e, c in self.terms], fr)

    def frobenius(self, i: int = 1) -> "TruncGps":
        """x^{q^i}: exponents times q^i, coefficients through Frobenius."""
        F = self.field
        n = F.q ** i
        fr = self.frontier if self.frontier == math.inf else self.frontier * n
        return TruncGps(F, [(e * n, F.pow(c, n)) for e, c in self.terms], fr)

    def substitute(self, P: BiPoly) -> "TruncGps":
        acc = TruncGps(self.field, [])
        xp = TruncGps(self.field, [(0, 1)])
        for j, c in enumerate(P.coeffs):
            if c:
                acc = acc + TruncGps.from_poly(c) * xp
            xp = xp * self
        return acc

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, TruncGps):
            return (self.field == other.field and self.terms == other.terms
                    and self.frontier == other.frontier)
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.terms, self.frontier))

    def __repr__(self):
        body = " + ".join(f"{self.field.format(c)}*t^{e}" for e, c in self.terms) or "0"
        return f"TruncGps({body} + O(t^{self.frontier}))"


def _fadd(a, b):
    if a == math.inf or b == math.inf:
        return math.inf
    return a + b


def from_automaton(x: GpsAutomaton, bound, max_terms: int = 1000,
                   budget: int = 1_000_000) -> TruncGps:
    """All terms below ``bound``; fails if the support there exceeds max_terms."""
    res = support_enum(x, bound, max_terms + 1, budget)
    if len(res.exponents) > max_terms or not res.complete:
        raise AccumulationError(
            f"support below {bound} has more than {max_terms} elements or could not be "
            "enumerated; use pointwise verification instead")
    return TruncGps(x.field, [(e, x.coeff(e)) for e in res.exponents], bound)


def ore_substitute(x: TruncGps, form: OreForm) -> TruncGps:
    acc = TruncGps(x.field, [])
    for i, a in form.terms:
        acc = acc + TruncGps.from_poly(a) * x.frobenius(i)
    if form.g is not None:
        acc = acc + TruncGps.from_poly(form.g)
    return acc


# -- series file format ---------------------------------------------------------------------------

def to_text(x: TruncGps) -> str:
    F = x.field
    fr = format_exponent(x.frontier, F.p)
    lines = [f"gps v1 {F.header()} frontier={fr}"]
    for e, c in x.terms:
        lines.append(f"{format_exponent(e, F.p)} {F.format(c)}")
    return "\n".join(lines) + "\n"


def from_text(text: str) -> TruncGps:
    from .dfao import parse_field_line

    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise FormatError("empty series file")
    m = re.match(r"^gps v1 (field .*?) frontier=(\S+)$", lines[0])
    if not m:
        raise FormatError("missing 'gps v1 field ... frontier=...' header")
    F = parse_field_line(m.group(1))
    fr = parse_exponent(m.group(2), F.p)
    terms = []
    seen = set()
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise FormatError(f"bad series line {ln!r}")
        e = parse_exponent(parts[0], F.p)
        if e in seen:
            raise FormatError(f"duplicate exponent {parts[0]}")
        if e >= fr:
            raise FormatError(f"exponent {parts[0]} not below the frontier")
        seen.add(e)
        terms.append((e, F.parse(parts[1])))
    return TruncGps(F, terms, fr)
