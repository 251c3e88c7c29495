"""Deterministic finite automata with output in F_q (DFAOs).

A machine reads digit strings over {0, ..., base-1}, optionally extended by
the radix point ``'.'`` (stored as symbol index ``base``).  The ``semantics``
tag says how a string encodes an exponent; operations check it and refuse
to mix conventions.
"""

from __future__ import annotations

import random
import re
from collections import deque
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Sequence

from .errors import AlphabetError, BudgetExceeded, FormatError, IncompatibleError, PreconditionError
from .field import FieldConfig

LSD_INTEGER = "lsd-integer"
MSD_INTEGER = "msd-integer"
MSD_FRACTIONAL = "msd-fractional"
MSD_RADIX = "msd-radix"
SEMANTICS = (LSD_INTEGER, MSD_INTEGER, MSD_FRACTIONAL, MSD_RADIX)

RADIX = "."


@dataclass(frozen=True)
class Dfao:
    """The tuple (I, O, S, i, f, T): alphabet, field, states, initial, outputs, transitions."""

    field: FieldConfig
    base: int
    radix: bool
    semantics: str
    initial: int
    outputs: tuple[int, ...]
    trans: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.semantics not in SEMANTICS:
            raise ValueError(f"unknown semantics {self.semantics!r}")
        if (self.semantics == MSD_RADIX) != self.radix:
            raise ValueError("the radix alphabet goes with msd-radix semantics and only with it")
        n = len(self.outputs)
        if n == 0:
            raise ValueError("an automaton needs at least one state")
        if len(self.trans) != n:
            raise ValueError("transition table size differs from state count")
        if not 0 <= self.initial < n:
            raise ValueError("initial state out of range")
        for row in self.trans:
            if len(row) != self.nsym:
                raise ValueError("transition map is not total")
            if any(not 0 <= d < n for d in row):
                raise ValueError("transition target out of range")
        if any(not 0 <= o < self.field.q for o in self.outputs):
            raise ValueError("output outside the field")

    @property
    def nsym(self) -> int:
        return self.base + (1 if self.radix else 0)

    @property
    def nstates(self) -> int:
        return len(self.outputs)

    def symbols(self, s) -> list[int]:
        """Translate a string (``"10.1"``) or sequence of digits/``'.'`` to symbol indices."""
        out = []
        for ch in s:
            if ch == RADIX:
                if not self.radix:
                    raise AlphabetError("radix point not in this alphabet")
                out.append(self.base)
                continue
            if isinstance(ch, str):
                from .digits import DIGIT_CHARS

                d = DIGIT_CHARS.find(ch.lower())
            else:
                d = int(ch)
            if not 0 <= d < self.base:
                raise AlphabetError(f"symbol {ch!r} outside digits 0..{self.base - 1}")
            out.append(d)
        return out

    def step(self, state: int, symbols: Iterable[int]) -> int:
        for a in symbols:
            state = self.trans[state][a]
        return state

    def run(self, s) -> int:
        """Output code on the string s."""
        return self.outputs[self.step(self.initial, self.symbols(s))]

    def __call__(self, s) -> int:
        return self.run(s)

    def same_kind(self, other: "Dfao"):
        self.field.check(other.field)
        if (self.base, self.radix, self.semantics) != (other.base, other.radix, other.semantics):
            raise IncompatibleError(
                f"incompatible machines: base/radix/semantics {self.base}/{self.radix}/"
                f"{self.semantics} vs {other.base}/{other.radix}/{other.semantics}")


def run(A: Dfao, s) -> int:
    return A.run(s)


# -- generic construction by exploration ----------------------------------------------

def explore(field: FieldConfig, base: int, radix: bool, semantics: str, start: Hashable,
            step: Callable[[Hashable, int], Hashable], output: Callable[[Hashable], int],
            budget: int | None = None) -> Dfao:
    """Build the reachable part of an implicitly given machine, numbering states in BFS order."""
    nsym = base + (1 if radix else 0)
    index = {start: 0}
    keys = [start]
    trans: list[list[int]] = []
    queue = deque([start])
    while queue:
        key = queue.popleft()
        row = []
        for a in range(nsym):
            nxt = step(key, a)
            j = index.get(nxt)
            if j is None:
                j = len(keys)
                if budget is not None and j >= budget:
                    raise BudgetExceeded(f"state budget {budget} exceeded", explored=j)
                index[nxt] = j
                keys.append(nxt)
                queue.append(nxt)
            row.append(j)
        trans.append(row)
    outputs = tuple(output(k) for k in keys)
    return Dfao(field, base, radix, semantics, 0, outputs, tuple(tuple(r) for r in trans))


def constant(field: FieldConfig, base: int, value: int = 0, semantics: str = LSD_INTEGER) -> Dfao:
    radix = semantics == MSD_RADIX
    nsym = base + (1 if radix else 0)
    return Dfao(field, base, radix, semantics, 0, (value,), ((0,) * nsym,))


def zero_machine(field, base, semantics=LSD_INTEGER) -> Dfao:
    return constant(field, base, 0, semantics)


def relabel(A: Dfao, **changes) -> Dfao:
    fields = dict(field=A.field, base=A.base, radix=A.radix, semantics=A.semantics,
                  initial=A.initial, outputs=A.outputs, trans=A.trans)
    fields.update(changes)
    return Dfao(**fields)


def map_outputs(A: Dfao, fn: Callable[[int], int]) -> Dfao:
    return relabel(A, outputs=tuple(fn(o) for o in A.outputs))


def reachable(A: Dfao, start: int | None = None, symbols: Sequence[int] | None = None) -> set[int]:
    start = A.initial if start is None else start
    syms = range(A.nsym) if symbols is None else symbols
    seen = {start}
    stack = [start]
    while stack:
        s = stack.pop()
        for a in syms:
            t = A.trans[s][a]
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return seen


def live_states(A: Dfao, symbols: Sequence[int] | None = None) -> set[int]:
    """States from which some string (over ``symbols``) reaches a nonzero output."""
    syms = range(A.nsym) if symbols is None else list(symbols)
    preds: list[set[int]] = [set() for _ in range(A.nstates)]
    for s in range(A.nstates):
        for a in syms:
            preds[A.trans[s][a]].add(s)
    live = {s for s in range(A.nstates) if A.outputs[s]}
    stack = list(live)
    while stack:
        s = stack.pop()
        for r in preds[s]:
            if r not in live:
                live.add(r)
                stack.append(r)
    return live


def shortest_path(A: Dfao, src: int, accept: Callable[[int], bool],
                  symbols: Sequence[int] | None = None, nonempty: bool = False):
    """Shortest symbol list leading from src to a state satisfying ``accept``."""
    syms = range(A.nsym) if symbols is None else list(symbols)
    if not nonempty and accept(src):
        return []
    parent: dict[int, tuple[int, int] | None] = {}
    queue = deque()
    for a in syms:
        t = A.trans[src][a]
        if t not in parent:
            parent[t] = (None, a)
            queue.append(t)
    while queue:
        s = queue.popleft()
        if accept(s):
            path = []
            cur = s
            while True:
                prev, a = parent[cur]
                path.append(a)
                if prev is None:
                    break
                cur = prev
            return path[::-1]
        for a in syms:
            t = A.trans[s][a]
            if t not in parent:
                parent[t] = (s, a)
                queue.append(t)
    return None


def prune(A: Dfao) -> Dfao:
    """Drop unreachable states, renumbering in BFS order."""
    return explore(A.field, A.base, A.radix, A.semantics, A.initial,
                   lambda s, a: A.trans[s][a], lambda s: A.outputs[s])


# -- product, minimization, reversal -------------------------------------------------

def product(A: Dfao, B: Dfao, combine: str | Callable[[int, int], int] = "add") -> Dfao:
    """Pointwise combination of two machines over the same alphabet and semantics."""
    A.same_kind(B)
    F = A.field
    if combine == "add":
        op = F.add
    elif combine == "mul":
        op = F.mul
    elif callable(combine):
        op = combine
    else:
        raise ValueError(f"unknown combine {combine!r}")
    return explore(F, A.base, A.radix, A.semantics, (A.initial, B.initial),
                   lambda st, a: (A.trans[st[0]][a], B.trans[st[1]][a]),
                   lambda st: op(A.outputs[st[0]], B.outputs[st[1]]))


def equivalence_classes(A: Dfao) -> list[int]:
    """Moore partition refinement; returns the class id of every state."""
    ids: dict = {}
    cls = [ids.setdefault(o, len(ids)) for o in A.outputs]
    count = len(ids)
    while True:
        ids = {}
        new = [ids.setdefault((cls[s], tuple(cls[t] for t in A.trans[s])), len(ids))
               for s in range(A.nstates)]
        if len(ids) == count:
            return new
        cls, count = new, len(ids)


def minimize(A: Dfao) -> Dfao:
    """Minimal equivalent machine with canonical (BFS, symbol order) numbering."""
    A = prune(A)
    cls = equivalence_classes(A)
    rep: dict[int, int] = {}
    for s, c in enumerate(cls):
        rep.setdefault(c, s)
    return explore(A.field, A.base, A.radix, A.semantics, cls[A.initial],
                   lambda c, a: cls[A.trans[rep[c]][a]], lambda c: A.outputs[rep[c]])


_REVERSED = {LSD_INTEGER: MSD_INTEGER, MSD_INTEGER: LSD_INTEGER}


def reverse(A: Dfao, budget: int = 100_000, semantics: str | None = None) -> Dfao:
    """Machine computing s -> A(reverse(s)), via tables h: S -> O with h'(s) = h(T(s, d))."""
    if A.radix:
        raise IncompatibleError("reverse needs a digits-only alphabet")
    if semantics is None:
        if A.semantics not in _REVERSED:
            raise IncompatibleError(
                f"no reversed semantics for {A.semantics}; pass one explicitly")
        semantics = _REVERSED[A.semantics]
    A = minimize(A)
    start = A.outputs
    R = explore(A.field, A.base, False, semantics, start,
                lambda h, d: tuple(h[A.trans[s][d]] for s in range(A.nstates)),
                lambda h: h[A.initial], budget=budget)
    return minimize(R)


# -- zero normalizations ----------------------------------------------------------------

def canonical_mask(field: FieldConfig, base: int, semantics: str) -> Dfao:
    """Machine with output 1 on canonical strings and 0 elsewhere."""
    if semantics in (LSD_INTEGER, MSD_FRACTIONAL):
        # 0: empty or last digit nonzero, 1: last digit zero
        trans = tuple((1,) + (0,) * (base - 1) for _ in range(2))
        return Dfao(field, base, False, semantics, 0, (1, 0), trans)
    if semantics == MSD_INTEGER:
        # 0: empty, 1: started, 2: leading zero seen
        trans = ((2,) + (1,) * (base - 1), (1,) * base, (2,) * base)
        return Dfao(field, base, False, semantics, 0, (1, 1, 0), trans)
    # msd-radix: 0 start, 1 integer digits, 2 dead, 3 after point (ok), 4 after point (last 0)
    R = base
    rows = {
        0: [2] + [1] * (base - 1) + [3],
        1: [1] * base + [3],
        2: [2] * (base + 1),
        3: [4] + [3] * (base - 1) + [2],
        4: [4] + [3] * (base - 1) + [2],
    }
    del R
    return Dfao(field, base, True, MSD_RADIX, 0, (0, 0, 0, 1, 0),
                tuple(tuple(rows[i]) for i in range(5)))


def zero_normalize(A: Dfao, mode: str = "canonical-zero") -> Dfao:
    """``canonical-zero``: output 0 on non-canonical strings, unchanged elsewhere.
    ``pad-invariant``: output on s equals output on s with padding zeros stripped.
    """
    if mode == "canonical-zero":
        mask = canonical_mask(A.field, A.base, A.semantics)
        return product(A, mask, "mul")
    if mode != "pad-invariant":
        raise ValueError(f"unknown mode {mode!r}")
    if A.semantics in (LSD_INTEGER, MSD_FRACTIONAL):
        # state: (current, output of the string with trailing zeros stripped)
        return explore(A.field, A.base, False, A.semantics,
                       (A.initial, A.outputs[A.initial]),
                       lambda st, d: (A.trans[st[0]][d],
                                      st[1] if d == 0 else A.outputs[A.trans[st[0]][d]]),
                       lambda st: st[1])
    if A.semantics == MSD_INTEGER:
        # a fresh start state swallows leading zeros
        start = ("lead",)
        return explore(A.field, A.base, False, A.semantics, start,
                       lambda st, d: (start if d == 0 else A.trans[A.initial][d])
                       if st == start else A.trans[st][d],
                       lambda st: A.outputs[A.initial] if st == start else A.outputs[st])
    raise IncompatibleError("pad-invariant mode needs a padding direction (not msd-radix)")


def is_pad_invariant(A: Dfao, max_len: int = 8) -> bool:
    """Exhaustive check of pad invariance on all strings up to max_len."""
    from itertools import product as iproduct

    for n in range(max_len + 1):
        for s in iproduct(range(A.base), repeat=n):
            s = list(s)
            padded = [0] + s if A.semantics == MSD_INTEGER else s + [0]
            if A.run(s) != A.run(padded):
                return False
    return True


# -- base recoding -----------------------------------------------------------------------

def block_recode(A: Dfao, p: int | None = None) -> Dfao:
    """LSD machine over base p^k digits -> LSD machine over base p digits.

    Each big digit is read as k little digits, lowest first, through
    intermediate states; partial blocks output as if zero-padded, which is
    exact for pad-invariant input.
    """
    if A.semantics != LSD_INTEGER:
        raise IncompatibleError("block_recode works on lsd-integer machines")
    p = A.field.p if p is None else p
    k, b = 0, 1
    while b < A.base:
        b *= p
        k += 1
    if b != A.base:
        raise IncompatibleError(f"base {A.base} is not a power of {p}")
    if k <= 1:
        return A

    def step(st, d):
        s, acc, pos = st
        acc += d * p**pos
        if pos + 1 == k:
            return (A.trans[s][acc], 0, 0)
        return (s, acc, pos + 1)

    def out(st):
        s, acc, pos = st
        return A.outputs[A.trans[s][acc]] if pos else A.outputs[s]

    return explore(A.field, p, False, LSD_INTEGER, (A.initial, 0, 0), step, out)


# -- DOT ---------------------------------------------------------------------------------

def dot_export(A: Dfao, name: str = "dfao") -> str:
    F = A.field
    lines = [f"digraph {name} {{", "  rankdir=LR;"]
    for s in range(A.nstates):
        o = A.outputs[s]
        style = 'shape=doublecircle' if o else 'shape=circle, style=dashed'
        extra = ", penwidth=2" if s == A.initial else ""
        lines.append(f'  s{s} [label="{s}/{F.format(o)}", {style}{extra}];')
    for s in range(A.nstates):
        for a in range(A.nsym):
            sym = RADIX if a == A.base else str(a)
            lines.append(f'  s{s} -> s{A.trans[s][a]} [label="{sym}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- text format -------------------------------------------------------------------------

def to_text(A: Dfao) -> str:
    F = A.field
    lines = ["dfao v1", F.header(),
             f"alphabet digits p={A.base} radix={'true' if A.radix else 'false'}",
             f"semantics {A.semantics}", f"states {A.nstates}", f"initial {A.initial}"]
    for s, o in enumerate(A.outputs):
        lines.append(f"output {s} {F.format(o)}")
    for s in range(A.nstates):
        for a in range(A.nsym):
            sym = RADIX if a == A.base else str(a)
            lines.append(f"trans {s} {sym} {A.trans[s][a]}")
    return "\n".join(lines) + "\n"


def parse_field_line(line: str) -> FieldConfig:
    m = re.match(r"^field\s+p=(\d+)\s+e=(\d+)(?:\s+modulus=\[([\d,\s]*)\])?$", line)
    if not m:
        raise FormatError(f"bad field line {line!r}")
    p, e = int(m.group(1)), int(m.group(2))
    mod = None
    if m.group(3) is not None:
        mod = tuple(int(x) for x in m.group(3).split(",") if x.strip())
        if e == 1 and len(mod) == 1:
            mod = None
    try:
        return FieldConfig(p, e, mod)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def from_text(text: str) -> Dfao:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or lines[0] != "dfao v1":
        raise FormatError("missing 'dfao v1' header")
    it = iter(lines[1:])
    try:
        field = parse_field_line(next(it))
        m = re.match(r"^alphabet digits p=(\d+) radix=(true|false)$", next(it))
        if not m:
            raise FormatError("bad alphabet line")
        base, radix = int(m.group(1)), m.group(2) == "true"
        m = re.match(r"^semantics (\S+)$", next(it))
        if not m or m.group(1) not in SEMANTICS:
            raise FormatError("bad semantics line")
        semantics = m.group(1)
        m = re.match(r"^states (\d+)$", next(it))
        if not m:
            raise FormatError("bad states line")
        n = int(m.group(1))
        m = re.match(r"^initial (\d+)$", next(it))
        if not m:
            raise FormatError("bad initial line")
        initial = int(m.group(1))
    except StopIteration as exc:
        raise FormatError("truncated automaton file") from exc
    nsym = base + (1 if radix else 0)
    outputs: dict[int, int] = {}
    trans: dict[tuple[int, int], int] = {}
    for ln in it:
        parts = ln.split()
        if parts[0] == "output" and len(parts) == 3:
            s = int(parts[1])
            if s in outputs:
                raise FormatError(f"duplicate output for state {s}")
            outputs[s] = field.parse(parts[2])
        elif parts[0] == "trans" and len(parts) == 4:
            s = int(parts[1])
            a = base if parts[2] == RADIX and radix else _sym(parts[2], base)
            if (s, a) in trans:
                raise FormatError(f"duplicate transition {s} {parts[2]}")
            trans[(s, a)] = int(parts[3])
        else:
            raise FormatError(f"unknown line {ln!r}")
    if sorted(outputs) != list(range(n)):
        raise FormatError("outputs missing or out of range")
    if len(trans) != n * nsym or any((s, a) not in trans for s in range(n) for a in range(nsym)):
        raise FormatError("transition table incomplete")
    try:
        return Dfao(field, base, radix, semantics, initial,
                    tuple(outputs[s] for s in range(n)),
                    tuple(tuple(trans[(s, a)] for a in range(nsym)) for s in range(n)))
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def _sym(tok: str, base: int) -> int:
    try:
        d = int(tok)
    except ValueError as exc:
        raise FormatError(f"bad symbol {tok!r}") from exc
    if not 0 <= d < base:
        raise FormatError(f"symbol {d} out of range")
    return d


# -- random machines (for tests and the CLI's seeded checks) ---------------------------------

def random_dfao(rng: random.Random, field: FieldConfig, base: int, nstates: int,
                semantics: str = LSD_INTEGER, zero_bias: float = 0.5) -> Dfao:
    radix = semantics == MSD_RADIX
    nsym = base + (1 if radix else 0)
    trans = tuple(tuple(rng.randrange(nstates) for _ in range(nsym)) for _ in range(nstates))
    outputs = tuple(0 if rng.random() < zero_bias else rng.randrange(1, field.q)
                    for _ in range(nstates))
    return Dfao(field, base, radix, semantics, 0, outputs, trans)


def check_radix_sink(A: Dfao) -> bool:
    """A second radix point always leads to states whose outputs are all zero."""
    if not A.radix:
        return True
    after_dot = set()
    for s in reachable(A):
        after_dot |= reachable(A, A.trans[s][A.base])
    for s in after_dot:
        second = A.trans[s][A.base]
        if any(A.outputs[t] for t in reachable(A, second)):
            return False
    return True


def require(cond: bool, message: str, witness=None):
    if not cond:
        raise PreconditionError(message, witness)
