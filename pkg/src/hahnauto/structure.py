"""Support structure of automatic series with fractional exponents.

Given a machine reading fractional digit strings (MSD first), this module
normalizes it, orders its strongly connected classes, checks the property
that separates well-ordered supports from the rest, turns that into
S_{a,b,c} parameters, and bounds the eventual periodicity of index
sequences.  It also hosts the reverse construction (coefficients plus
periodicity data to automaton) and a certificate for linear recurrences.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import dfao as dfa
from . import gps
from .christol import reduce_to_polynomial
from .digits import SabcParams, p_power_exponent
from .errors import BudgetExceeded, PreconditionError
from .field import FieldConfig
from .linalg import matmul, nullspace, rref, solve

__all__ = [
    "normalize_for_analysis", "fractional_machine", "scc_order", "SccOrder",
    "check_single_reentry", "ReentryWitness", "ReentryOk", "certify_sabc", "certify_gps",
    "CertifyReport", "structural_periodicity", "PeriodicityBounds",
    "check_index_periodicity", "IndexPeriodicityReport", "build_from_criterion",
    "CriterionBuild", "criterion_state_count", "RecurrenceSystem",
    "recurrence_periodicity", "RecurrenceCertificate", "reduce_to_polynomial",
    "simulate_recurrence", "verify_certificate", "recurrence_to_text", "recurrence_from_text",
]


# -- normalization ------------------------------------------------------------------------------

def fractional_machine(x: gps.GpsAutomaton, n: int = 0) -> dfa.Dfao:
    """MSD-fractional machine for f -> coeff(x, n + f), f in [0, 1)."""
    A = x.machine
    p = A.base
    s = A.initial
    digits = []
    while n:
        digits.append(n % p)
        n //= p
    for d in reversed(digits):
        s = A.trans[s][d]
    s = A.trans[s][p]
    B = dfa.Dfao(A.field, p, False, dfa.MSD_FRACTIONAL, s, A.outputs,
                 tuple(tuple(r[:p]) for r in A.trans))
    return dfa.minimize(B)


def normalize_for_analysis(A: dfa.Dfao) -> dfa.Dfao:
    """Canonical-zero, then reachable part, then all dead states merged into one."""
    if A.semantics != dfa.MSD_FRACTIONAL:
        raise dfa.IncompatibleError("analysis works on msd-fractional machines")
    B = dfa.prune(dfa.zero_normalize(A, "canonical-zero"))
    live = dfa.live_states(B)
    DEAD = -1

    def key(s):
        return s if s in live else DEAD

    return dfa.explore(B.field, B.base, False, B.semantics, key(B.initial),
                       lambda s, a: DEAD if s == DEAD else key(B.trans[s][a]),
                       lambda s: 0 if s == DEAD else B.outputs[s])


def terminal_states(A: dfa.Dfao) -> set[int]:
    """States that can only lead to zero states."""
    return set(range(A.nstates)) - dfa.live_states(A)


# -- strongly connected classes ----------------------------------------------------------------------

@dataclass(frozen=True)
class SccOrder:
    classes: tuple  # tuple of sorted state tuples, in topological order (sources first)
    class_of: tuple  # state -> class index
    edges: frozenset  # condensation DAG edges (i, j), i > j in the reachability order
    nonterminal: tuple  # indices of classes that are not terminal

    @property
    def m(self) -> int:
        return len(self.nonterminal)

    @property
    def sizes(self) -> tuple:
        return tuple(len(c) for c in self.classes)


def _tarjan(n, succ):
    index = [None] * n
    low = [0] * n
    on = [False] * n
    stack, comps = [], []
    counter = 0
    for root in range(n):
        if index[root] is not None:
            continue
        work = [(root, iter(succ[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on[root] = True
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if index[w] is None:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on[w] = True
                    work.append((w, iter(succ[w])))
                    advanced = True
                    break
                if on[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
    return comps  # reverse topological order


def scc_order(A: dfa.Dfao) -> SccOrder:
    succ = [sorted(set(row)) for row in A.trans]
    comps = list(reversed(_tarjan(A.nstates, succ)))
    class_of = [0] * A.nstates
    for i, c in enumerate(comps):
        for s in c:
            class_of[s] = i
    edges = set()
    for s in range(A.nstates):
        for t in succ[s]:
            if class_of[s] != class_of[t]:
                edges.add((class_of[s], class_of[t]))
    for i, j in edges:
        if i >= j:
            raise AssertionError("condensation is not acyclic")
    dead = terminal_states(A)
    nonterm = tuple(i for i, c in enumerate(comps) if not set(c) <= dead)
    return SccOrder(tuple(tuple(c) for c in comps), tuple(class_of), frozenset(edges), nonterm)


# -- single reentry -------------------------------------------------------------------------------------

@dataclass(frozen=True)
class ReentryWitness:
    """Data for an infinite descending family of support points.

    kind "two-loops": entry, then loopA^k loopB, then exit (loopA < loopB).
    kind "descending-exit": entry, then loopA^k, then exit, whose first
    symbol is larger than loopA's.
    """

    kind: str
    state: int
    loopA: tuple
    loopB: tuple | None
    entry: tuple
    exit: tuple

    def family(self, k: int) -> tuple:
        """The k-th string of the descending family."""
        tail = (self.loopB if self.loopB is not None else ()) + self.exit
        return self.entry + self.loopA * k + tail


@dataclass(frozen=True)
class ReentryOk:
    """Per nonterminal state, the unique in-class symbol (or None)."""

    in_class: tuple


def _path_within(A, src, dst, allowed):
    """Shortest symbol path from src to dst staying inside ``allowed``."""
    if src == dst:
        return ()
    prev = {src: None}
    queue = [src]
    i = 0
    while i < len(queue):
        s = queue[i]
        i += 1
        for a in range(A.nsym):
            t = A.trans[s][a]
            if t in allowed and t not in prev:
                prev[t] = (s, a)
                if t == dst:
                    path = []
                    cur = t
                    while prev[cur] is not None:
                        cur, sym = prev[cur][0], prev[cur][1]
                        path.append(sym)
                    return tuple(reversed(path))
                queue.append(t)
    return None


def check_single_reentry(A: dfa.Dfao):
    """ReentryOk, or a ReentryWitness proving the support is not well-ordered.

    Expects a normalized machine (see normalize_for_analysis).
    """
    order = scc_order(A)
    dead = terminal_states(A)
    table = [None] * A.nstates
    for s in range(A.nstates):
        if s in dead:
            continue
        cls = order.class_of[s]
        members = set(order.classes[cls])
        inside = [a for a in range(A.nsym) if A.trans[s][a] in members]
        exits = [a for a in range(A.nsym)
                 if A.trans[s][a] not in members and A.trans[s][a] not in dead]
        bad_exit = [b for b in exits if inside and b > min(inside)]
        if len(inside) >= 2 or bad_exit:
            entry = tuple(dfa.shortest_path(A, A.initial, lambda u: u == s))
            a = inside[0]
            loopA = (a,) + _path_within(A, A.trans[s][a], s, members)
            if len(inside) >= 2:
                b = inside[1]
                loopB = (b,) + _path_within(A, A.trans[s][b], s, members)
                ext = tuple(dfa.shortest_path(A, s, lambda u: A.outputs[u] != 0))
                return ReentryWitness("two-loops", s, loopA, loopB, entry, ext)
            b = bad_exit[0]
            ext = (b,) + tuple(dfa.shortest_path(A, A.trans[s][b], lambda u: A.outputs[u] != 0))
            return ReentryWitness("descending-exit", s, loopA, None, entry, ext)
        table[s] = inside[0] if inside else None
    # consequence: each nonterminal class is one cycle
    for ci in order.nonterminal:
        members = order.classes[ci]
        if len(members) > 1 and any(table[s] is None for s in members):
            raise AssertionError("nonterminal class is not a single cycle")
    return ReentryOk(tuple(table))


# -- S_{a,b,c} certification ------------------------------------------------------------------------------

@dataclass(frozen=True)
class CertifyReport:
    m: int
    n: int
    d: int
    params: SabcParams
    class_sizes: tuple = ()
    classes: tuple = ()

    def to_text(self) -> str:
        a, b, c = self.params.a, self.params.b, self.params.c
        lines = [f"m {self.m}", f"n {self.n}", f"a {a}", f"b {b}", f"c {c}", f"d {self.d}"]
        for i, cls in enumerate(self.classes):
            lines.append(f"class {i} size {len(cls)} states {' '.join(map(str, cls))}")
        return "\n".join(lines) + "\n"


def certify_sabc(A: dfa.Dfao) -> CertifyReport:
    """Parameters (p^n - 1, 0, (p-1) m (n+1) + 1) covering the support of A."""
    N = normalize_for_analysis(A)
    res = check_single_reentry(N)
    if isinstance(res, ReentryWitness):
        raise PreconditionError("support is not well-ordered; cannot certify", res)
    order = scc_order(N)
    sizes = [len(order.classes[i]) for i in order.nonterminal]
    n = math.lcm(*sizes) if sizes else 1
    m = order.m
    d = m * (n + 1)
    p = A.base
    params = SabcParams(p**n - 1, 0, (p - 1) * d + 1)
    classes = tuple(order.classes[i] for i in order.nonterminal)
    return CertifyReport(m, n, d, params, tuple(sizes), classes)


def certify_gps(x: gps.GpsAutomaton) -> CertifyReport:
    """Certify every fractional component of a radix machine at a common n."""
    reports = [certify_sabc(_component(zj)) for _, zj in gps.decompose(x)]
    n = math.lcm(*(r.n for r in reports)) if reports else 1
    m = max((r.m for r in reports), default=0)
    d = m * (n + 1)
    p = x.p
    return CertifyReport(m, n, d, SabcParams(p**n - 1, 0, (p - 1) * d + 1),
                         tuple(s for r in reports for s in r.class_sizes))


def _component(z: gps.GpsAutomaton) -> dfa.Dfao:
    return fractional_machine(z, 0)


# -- periodicity ----------------------------------------------------------------------------------------

@dataclass(frozen=True)
class PeriodicityBounds:
    M: int
    N: int


def structural_periodicity(A: dfa.Dfao) -> PeriodicityBounds:
    """Head and period of s, T(s, p-1), T(T(s, p-1), p-1), ... over reachable s."""
    top = A.base - 1
    M = 0
    N = 1
    for s in dfa.reachable(A):
        seen = {}
        cur, k = s, 0
        while cur not in seen:
            seen[cur] = k
            cur = A.trans[cur][top]
            k += 1
        M = max(M, seen[cur])
        N = max(N, k - seen[cur])
    assert M <= A.nstates and N <= A.nstates
    return PeriodicityBounds(M, N)


@dataclass(frozen=True)
class IndexPeriodicityReport:
    families: int
    violations: tuple  # (m, digits, j, sequence)
    window: int
    note: str = "finite-window check: a violation disproves, absence is only evidence"

    @property
    def ok(self) -> bool:
        return not self.violations


def _coeff_or_zero(coeff, r: Fraction, p: int) -> int:
    if r < 0 or p_power_exponent(r.denominator, p) is None:
        return 0
    return coeff(r)


def index_sequence(coeff, params: SabcParams, p: int, m: int, digits, j: int, length: int):
    """c_n = x_{(m - b_1/p - ... - b_{j-1}/p^{j-1} - p^-n (b_j/p^j + ...)) / a}."""
    head = sum((Fraction(b, p ** (i + 1)) for i, b in enumerate(digits[: j - 1])), Fraction(0))
    tail = sum((Fraction(b, p ** (i + 1)) for i, b in enumerate(digits[j - 1:], start=j - 1)),
               Fraction(0))
    out = []
    for n in range(length):
        r = (m - head - tail / p**n) / params.a
        out.append(_coeff_or_zero(coeff, r, p))
    return out


def _eventually_periodic(seq, M, N):
    for P in range(1, N + 1):
        if all(seq[n] == seq[n + P] for n in range(M, len(seq) - P)):
            return True
    return False


def check_index_periodicity(coeff: Callable, params: SabcParams, bounds: PeriodicityBounds,
                            p: int, max_m: int = 2, max_digits: int = 3,
                            window: int | None = None) -> IndexPeriodicityReport:
    """Probe every sequence of the index form within the limits."""
    window = window or 4 * (bounds.M + bounds.N) + 16
    violations = []
    families = 0
    for m in range(-params.b, max_m + 1):
        for L in range(0, max_digits + 1):
            for digits in itertools.product(range(p), repeat=L):
                if sum(digits) > params.c or (L and digits[-1] == 0):
                    continue
                for j in range(1, L + 2):
                    families += 1
                    seq = index_sequence(coeff, params, p, m, digits, j, window)
                    if not _eventually_periodic(seq, bounds.M, bounds.N):
                        violations.append((m, digits, j, tuple(seq)))
    return IndexPeriodicityReport(families, tuple(violations), window)


# -- automaton from the criterion --------------------------------------------------------------------------

@dataclass(frozen=True)
class CriterionBuild:
    machine: dfa.Dfao
    strip: int
    runcap: int
    provenance: dict = dc_field(default_factory=dict)
    warnings: tuple = ()


def criterion_state_count(p: int, c: int, runcap: int) -> int:
    """Strings with at most c digits != p-1 and no run of runcap (p-1)'s, plus the dummy."""
    return sum((p - 1) ** k * runcap ** (k + 1) for k in range(c + 1)) + 1


def build_from_criterion(coeff: Callable, p: int, field: FieldConfig, c: int, M: int, N: int,
                         runcap: int | None = None, budget: int = 200_000) -> CriterionBuild:
    """Fractional machine whose states are short digit strings with capped runs of p-1."""
    L = math.factorial(N)
    prov = {"rule": "runcap = M + N!", "M": M, "N": N}
    if runcap is not None:
        step = math.lcm(*range(1, N + 1)) if N else 1
        strip = runcap - M
        if strip <= 0 or strip % step:
            raise ValueError(f"runcap - M must be a positive multiple of lcm(1..{N}) = {step}")
        L = strip
        prov = {"rule": "override", "M": M, "N": N, "runcap": runcap}
    cap = M + L
    top = p - 1
    notes = []
    if coeff(Fraction(0)) != 0:
        msg = "coefficient at exponent 0 is nonzero; the construction outputs 0 there"
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        notes.append(msg)
    Z = ("z",)

    def ok(s):
        if sum(1 for d in s if d != top) > c:
            return False
        run = 0
        for d in s:
            run = run + 1 if d == top else 0
            if run >= cap:
                return False
        return True

    def step(s, a):
        if s == Z:
            return Z
        u = s + (a,)
        if ok(u):
            return u
        if len(u) >= L and all(d == top for d in u[-L:]):
            return u[:-L]
        return Z

    def output(s):
        if s == Z or not s:
            return 0
        r = sum(Fraction(d, p ** (i + 1)) for i, d in enumerate(s))
        return coeff(r)

    A = dfa.explore(field, p, False, dfa.MSD_FRACTIONAL, (), step, output, budget=budget)
    return CriterionBuild(A, L, cap, prov, tuple(notes))


# -- linear recurrences ------------------------------------------------------------------------------------

@dataclass(frozen=True)
class RecurrenceSystem:
    """sum_i sum_j d[e][i][j] c_{j, m+i} = 0 for every equation e and m >= 0.

    ``extra`` holds additional linear relations on the initial window
    (c_{j,i} for i < k), as rows over the flattened state (i major).
    """

    field: FieldConfig
    d: tuple  # d[e][i][j], i = 0..k, j = 0..n
    extra: tuple = ()

    @property
    def k(self) -> int:
        return len(self.d[0]) - 1

    @property
    def n(self) -> int:
        return len(self.d[0][0]) - 1


@dataclass(frozen=True)
class RecurrenceCertificate:
    head: int
    period: int
    dim: int
    shift: np.ndarray = dc_field(repr=False, compare=False)
    basis: tuple = dc_field(default=(), repr=False, compare=False)


def _step_matrix(R: RecurrenceSystem):
    """State S_m = (C_m, ..., C_{m+k-1}); returns (M, C) with S_{m+1} = M S_m and C S_m = 0."""
    F = R.field
    k, w = R.k, R.n + 1
    E = len(R.d)
    D = np.array(R.d, dtype=np.int64)  # (E, k+1, w)
    lead = D[:, k, :]
    # row-reduce [lead | rest] to solve for C_{m+k}
    rest = D[:, :k, :].reshape(E, k * w)
    aug = np.hstack([lead, rest])
    Rm, piv = rref(F, aug)
    if piv[:w] != list(range(w)):
        raise PreconditionError("leading coefficients do not determine the next term")
    # rows 0..w-1: C_{m+k} + X S_m = 0 ; rows beyond give constraints on S_m
    X = Rm[:w, w:]
    cons = Rm[w:, w:]
    cons = cons[np.any(cons != 0, axis=1)] if cons.size else np.zeros((0, k * w), dtype=np.int64)
    n = k * w
    M = np.zeros((n, n), dtype=np.int64)
    for i in range(n - w):
        M[i, i + w] = 1
    M[n - w:, :] = F.vneg(X)
    return M, cons


def recurrence_periodicity(R: RecurrenceSystem, max_iter: int = 100_000) -> RecurrenceCertificate:
    F = R.field
    M, C = _step_matrix(R)
    n = M.shape[0]
    rows = [C] if C.size else []
    if R.extra:
        rows.append(np.array(R.extra, dtype=np.int64))
    if C.size:
        P = C
        for _ in range(n):
            P = matmul(F, P, M)
            rows.append(P)
    if rows:
        V = nullspace(F, np.vstack(rows), n)
    else:
        V = [np.eye(n, dtype=np.int64)[i] for i in range(n)]
    dim = len(V)
    if dim == 0:
        return RecurrenceCertificate(0, 1, 0, np.zeros((0, 0), dtype=np.int64))
    Bm = np.stack(V, axis=1)  # n x dim, columns span V
    # coordinates of M v in the basis of V
    MV = matmul(F, M, Bm)
    coords = np.zeros((dim, dim), dtype=np.int64)
    for c in range(dim):
        sol = solve(F, Bm, MV[:, c])
        if sol is None:
            raise AssertionError("solution space is not shift-stable")
        coords[:, c] = sol
    seen = {}
    P = np.eye(dim, dtype=np.int64)
    for i in range(max_iter):
        key = P.tobytes()
        if key in seen:
            head = seen[key]
            return RecurrenceCertificate(head, i - head, dim, coords, tuple(V))
        seen[key] = i
        P = matmul(F, coords, P)
    raise BudgetExceeded("matrix powers did not repeat within the iteration budget", explored=max_iter)


def simulate_recurrence(R: RecurrenceSystem, state0, length: int):
    """Vector sequence C_0, C_1, ... from an initial state in the solution space."""
    F = R.field
    M, _ = _step_matrix(R)
    w = R.n + 1
    S = np.asarray(state0, dtype=np.int64)
    out = [S[i * w:(i + 1) * w].copy() for i in range(R.k)]
    while len(out) < length:
        S = matmul(F, M, S.reshape(-1, 1)).ravel()
        out.append(S[-w:].copy())
    return out[:length]


def verify_certificate(R: RecurrenceSystem, cert: RecurrenceCertificate) -> bool:
    """Simulate every basis solution and check equations plus eventual periodicity."""
    F = R.field
    L = 3 * (cert.head + cert.period) + R.k + 1
    D = np.array(R.d, dtype=np.int64)
    for v in cert.basis:
        seq = simulate_recurrence(R, v, L + cert.period)
        for m in range(len(seq) - R.k):
            for e in range(D.shape[0]):
                acc = 0
                for i in range(R.k + 1):
                    for j in range(R.n + 1):
                        acc = F.add(acc, F.mul(int(D[e, i, j]), int(seq[m + i][j])))
                if acc:
                    return False
        for m in range(cert.head, L):
            if not np.array_equal(seq[m], seq[m + cert.period]):
                return False
    return True


def recurrence_to_text(R: RecurrenceSystem) -> str:
    """``recurrence v1`` file: one ``eq`` line per equation, coefficients i major."""
    F = R.field
    out = [f"recurrence v1 {F.header()} k={R.k} n={R.n}"]
    for eq in R.d:
        out.append("eq " + " ".join(F.format(int(c)) for row in eq for c in row))
    for row in R.extra:
        out.append("extra " + " ".join(F.format(int(c)) for c in row))
    return "\n".join(out) + "\n"


def recurrence_from_text(text: str) -> RecurrenceSystem:
    import re

    from .errors import FormatError

    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    m = re.match(r"^recurrence v1 (field .*?) k=(\d+) n=(\d+)$", lines[0]) if lines else None
    if not m:
        raise FormatError("missing 'recurrence v1 field ... k=.. n=..' header")
    F = dfa.parse_field_line(m.group(1))
    k, n = int(m.group(2)), int(m.group(3))
    w = n + 1
    eqs, extra = [], []
    for ln in lines[1:]:
        kind, _, rest = ln.partition(" ")
        vals = [F.parse(tok) for tok in rest.split()]
        if kind == "eq":
            if len(vals) != (k + 1) * w:
                raise FormatError(f"equation needs {(k + 1) * w} coefficients")
            eqs.append(tuple(tuple(vals[i * w:(i + 1) * w]) for i in range(k + 1)))
        elif kind == "extra":
            if len(vals) != k * w:
                raise FormatError(f"extra relation needs {k * w} coefficients")
            extra.append(tuple(vals))
        else:
            raise FormatError(f"bad recurrence line {ln!r}")
    if not eqs:
        raise FormatError("recurrence has no equations")
    return RecurrenceSystem(F, tuple(eqs), tuple(extra))
