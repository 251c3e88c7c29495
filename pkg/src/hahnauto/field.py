"""Finite fields F_q = F_p[g]/(modulus) with integer-coded elements.

An element is stored as the integer whose base-p digits are its coordinates
with respect to 1, g, g^2, ... (lowest first).  Multiplication goes through
discrete log tables, which keeps every operation O(1) for the desk-scale
fields (q <= 2^16) the rest of the package works with.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigMismatchError, FormatError

MAX_ORDER = 1 << 16


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


# -- dense polynomials over F_p as plain int lists (low degree first) ---------

def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a, m, p):
    a = list(a)
    inv = pow(m[-1], -1, p)
    dm = len(m) - 1
    for k in range(len(a) - 1, dm - 1, -1):
        c = a[k] * inv % p
        if c:
            for i in range(dm + 1):
                a[k - dm + i] = (a[k - dm + i] - c * m[i]) % p
    return _trim(a[:dm] if len(a) > dm else a)


def _pmul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _psub(a, b, p):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    for i, y in enumerate(b):
        a[i] = (a[i] - y) % p
    return _trim(a)


def _pgcd(a, b, p):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def is_irreducible_mod_p(m, p: int) -> bool:
    """Ben-Or test: gcd(m, X^{p^k} - X) = 1 for every k <= deg(m)/2."""
    m = _trim(list(m))
    d = len(m) - 1
    if d < 1:
        return False
    if d == 1:
        return True
    x = [0, 1]
    power = x
    for _ in range(d // 2):
        # power <- power^p mod m
        acc, base, e = [1], power, p
        while e:
            if e & 1:
                acc = _pmod(_pmul(acc, base, p), m, p)
            base = _pmod(_pmul(base, base, p), m, p)
            e >>= 1
        power = acc
        g = _pgcd(m, _psub(power, x, p), p)
        if len(g) > 1:
            return False
    return True


def default_modulus(p: int, e: int) -> tuple[int, ...]:
    """Smallest monic irreducible of degree e, ordered by its low-coefficient code."""
    if e == 1:
        return (0, 1)
    for k in range(p**e):
        low = [(k // p**i) % p for i in range(e)]
        cand = low + [1]
        if is_irreducible_mod_p(cand, p):
            return tuple(cand)
    raise AssertionError("an irreducible polynomial of every degree exists")


@dataclass(frozen=True)
class FieldConfig:
    """The field F_{p^e}, presented by an irreducible monic ``modulus``.

    ``modulus`` lists coefficients lowest first and includes the leading 1.
    """

    p: int
    e: int = 1
    modulus: tuple[int, ...] | None = None

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if self.e < 1:
            raise ValueError("e must be positive")
        if self.p**self.e > MAX_ORDER:
            raise ValueError(f"q={self.p}^{self.e} exceeds desk-scale limit {MAX_ORDER}")
        if self.modulus is None:
            object.__setattr__(self, "modulus", default_modulus(self.p, self.e))
        else:
            mod = tuple(int(c) % self.p for c in self.modulus)
            if len(mod) != self.e + 1 or mod[-1] != 1:
                raise ValueError("modulus must be monic of degree e")
            if not is_irreducible_mod_p(mod, self.p):
                raise ValueError(f"modulus {list(mod)} is reducible over F_{self.p}")
            object.__setattr__(self, "modulus", mod)

    # -- basic data -----------------------------------------------------------

    @property
    def q(self) -> int:
        return self.p**self.e

    def __repr__(self):
        if self.e == 1:
            return f"F_{self.p}"
        return f"F_{self.p}^{self.e}[{list(self.modulus)}]"

    def check(self, other: "FieldConfig"):
        if self != other:
            raise ConfigMismatchError(f"field mismatch: {self!r} vs {other!r}")

    def digits(self, a: int) -> list[int]:
        p = self.p
        return [(a // p**i) % p for i in range(self.e)]

    def from_digits(self, ds) -> int:
        p = self.p
        return sum((int(d) % p) * p**i for i, d in enumerate(ds))

    def elem(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            self.check(value.field)
            return value
        if isinstance(value, int):
            return FieldElement(self, self.embed(value))
        return FieldElement(self, self.from_digits(value))

    def embed(self, n: int) -> int:
        """Code of the prime-field image of the integer n."""
        return n % self.p

    # -- tables ---------------------------------------------------------------

    def _slow_mul(self, a: int, b: int) -> int:
        prod = _pmul(self.digits(a), self.digits(b), self.p)
        return self.from_digits(_pmod(prod, self.modulus, self.p))

    @cached_property
    def _tables(self):
        q = self.q
        exp = np.zeros(2 * q, dtype=np.int64)
        log = np.zeros(q, dtype=np.int64)
        if q == 2:
            exp[:] = 1
            return exp, log
        candidates = [self.p] + list(range(2, q)) if self.e > 1 else list(range(2, q))
        for g in candidates:
            x, seen = 1, 0
            powers = [1]
            while True:
                x = (x * g) % self.p if self.e == 1 else self._slow_mul(x, g)
                seen += 1
                if x == 1:
                    break
                powers.append(x)
            if seen == q - 1:
                break
        for i, v in enumerate(powers):
            exp[i] = v
            log[v] = i
        exp[q - 1 : 2 * q - 2] = exp[: q - 1]
        return exp, log

    @cached_property
    def generator(self) -> int:
        return int(self._tables[0][1])

    # -- scalar arithmetic on codes -------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        return self.from_digits(x + y for x, y in zip(self.digits(a), self.digits(b)))

    def neg(self, a: int) -> int:
        if self.e == 1:
            return (-a) % self.p
        if self.p == 2:
            return a
        return self.from_digits(-x for x in self.digits(a))

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a * b) % self.p
        if a == 0 or b == 0:
            return 0
        exp, log = self._tables
        return int(exp[log[a] + log[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in finite field")
        if self.e == 1:
            return pow(a, -1, self.p)
        exp, log = self._tables
        return int(exp[(self.q - 1 - log[a]) % (self.q - 1)])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        if n < 0:
            return self.pow(self.inv(a), -n)
        if n == 0:
            return 1
        if a == 0:
            return 0
        if self.e == 1:
            return pow(a, n, self.p)
        exp, log = self._tables
        return int(exp[(int(log[a]) * n) % (self.q - 1)])

    def frobenius(self, a: int) -> int:
        return self.pow(a, self.p)

    # -- vectorised arithmetic on numpy code arrays ---------------------------

    def vadd(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.e == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        for i in range(self.e):
            w = self.p**i
            out += ((a // w % self.p + b // w % self.p) % self.p) * w
        return out

    def vneg(self, a):
        a = np.asarray(a, dtype=np.int64)
        if self.e == 1:
            return (-a) % self.p
        if self.p == 2:
            return a
        out = np.zeros_like(a)
        for i in range(self.e):
            w = self.p**i
            out += ((-(a // w % self.p)) % self.p) * w
        return out

    def vsub(self, a, b):
        return self.vadd(a, self.vneg(b))

    def vmul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.e == 1:
            return (a * b) % self.p
        exp, log = self._tables
        out = exp[log[a] + log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    # -- text encoding --------------------------------------------------------

    def format(self, a: int) -> str:
        if self.e == 1:
            return str(a)
        return "[" + ",".join(str(d) for d in self.digits(a)) + "]"

    def parse(self, text: str) -> int:
        text = text.strip()
        try:
            if text.startswith("["):
                if not text.endswith("]"):
                    raise FormatError(f"bad field element {text!r}")
                parts = [s for s in text[1:-1].split(",") if s.strip()]
                if len(parts) != self.e:
                    raise FormatError(f"expected {self.e} coordinates in {text!r}")
                ds = [int(s) for s in parts]
                if any(not 0 <= d < self.p for d in ds):
                    raise FormatError(f"coordinate out of range in {text!r}")
                return self.from_digits(ds)
            v = int(text)
        except ValueError as exc:
            raise FormatError(f"bad field element {text!r}") from exc
        if self.e == 1 and not 0 <= v < self.p:
            raise FormatError(f"residue {v} out of range for p={self.p}")
        return v % self.p

    def header(self) -> str:
        if self.e == 1:
            return f"field p={self.p} e=1"
        return f"field p={self.p} e={self.e} modulus=[{','.join(map(str, self.modulus))}]"


class FieldElement:
    """An element of a configured field.  Thin operator wrapper over a code."""

    __slots__ = ("field", "code")

    def __init__(self, field: FieldConfig, code: int):
        if not 0 <= code < field.q:
            raise ValueError(f"code {code} out of range for {field!r}")
        self.field = field
        self.code = code

    @property
    def coeffs(self) -> tuple[int, ...]:
        return tuple(self.field.digits(self.code))

    def _other(self, other):
        if isinstance(other, FieldElement):
            self.field.check(other.field)
            return other.code
        if isinstance(other, int):
            return self.field.embed(other)
        return NotImplemented

    def __add__(self, other):
        b = self._other(other)
        return FieldElement(self.field, self.field.add(self.code, b))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._other(other)
        return FieldElement(self.field, self.field.sub(self.code, b))

    def __rsub__(self, other):
        b = self._other(other)
        return FieldElement(self.field, self.field.sub(b, self.code))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.code))

    def __mul__(self, other):
        b = self._other(other)
        return FieldElement(self.field, self.field.mul(self.code, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._other(other)
        return FieldElement(self.field, self.field.div(self.code, b))

    def __pow__(self, n: int):
        return FieldElement(self.field, self.field.pow(self.code, n))

    def inv(self):
        return FieldElement(self.field, self.field.inv(self.code))

    def frobenius(self):
        return FieldElement(self.field, self.field.frobenius(self.code))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.code == other.code
        if isinstance(other, int):
            return self.code == self.field.embed(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.code))

    def __bool__(self):
        return self.code != 0

    def __repr__(self):
        return self.field.format(self.code)


def parse_field_spec(text: str) -> FieldConfig:
    """Parse ``p``, ``p^e`` or ``p^e:[m0,...,me]``."""
    text = text.strip()
    modulus = None
    if ":" in text:
        text, mod = text.split(":", 1)
        mod = mod.strip()
        if not (mod.startswith("[") and mod.endswith("]")):
            raise FormatError(f"bad modulus {mod!r}")
        try:
            modulus = tuple(int(s) for s in mod[1:-1].split(","))
        except ValueError as exc:
            raise FormatError(f"bad modulus {mod!r}") from exc
    try:
        if "^" in text:
            p, e = (int(s) for s in text.split("^"))
        else:
            p, e = int(text), 1
    except ValueError as exc:
        raise FormatError(f"bad field spec {text!r}") from exc
    try:
        return FieldConfig(p, e, modulus)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
