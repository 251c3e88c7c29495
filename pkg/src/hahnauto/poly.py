"""Polynomials, rational functions and truncated power series over F_q.

Coefficients are field codes (see :mod:`hahnauto.field`).  Everything is
immutable; arithmetic returns new objects.
"""

from __future__ import annotations

import math
import re

import numpy as np
from scipy.signal import fftconvolve

from .errors import FormatError, InseparableError, NoRootError
from .field import FieldConfig, FieldElement

NEG_INF = float("-inf")

_FFT_MIN = 64


def convolve(field: FieldConfig, a, b, limit: int | None = None) -> list[int]:
    """Product of two code sequences, truncated to ``limit`` terms."""
    la, lb = len(a), len(b)
    if la == 0 or lb == 0:
        return []
    n = la + lb - 1 if limit is None else min(limit, la + lb - 1)
    if n <= 0:
        return []
    a, b = list(a[:n]), list(b[:n])
    if min(len(a), len(b)) < 16 and field.e == 1:
        p = field.p
        out = [0] * n
        for i, x in enumerate(a):
            if x:
                for j in range(min(len(b), n - i)):
                    out[i + j] += x * b[j]
        return [v % p for v in out]
    p, e = field.p, field.e
    A = np.array(a, dtype=np.int64)
    B = np.array(b, dtype=np.int64)
    if e == 1:
        return [int(v) for v in _iconv(A, B, p)[:n]]
    ad = [(A // p**i) % p for i in range(e)]
    bd = [(B // p**i) % p for i in range(e)]
    size = len(a) + len(b) - 1
    parts = [np.zeros(size, dtype=np.int64) for _ in range(2 * e - 1)]
    for i in range(e):
        for j in range(e):
            parts[i + j] = (parts[i + j] + _iconv(ad[i], bd[j], p)) % p
    mod = field.modulus
    for k in range(2 * e - 2, e - 1, -1):
        c = parts[k]
        for m in range(e):
            parts[k - e + m] = (parts[k - e + m] - c * mod[m]) % p
    out = np.zeros(size, dtype=np.int64)
    for i in range(e):
        out += parts[i] * p**i
    return [int(v) for v in out[:n]]


def _iconv(a, b, p):
    if min(len(a), len(b)) < _FFT_MIN:
        return np.convolve(a, b) % p
    # exact while the largest partial sum stays well inside float64 precision
    bound = (p - 1) ** 2 * min(len(a), len(b))
    if bound < 2**40:
        return np.rint(fftconvolve(a.astype(float), b.astype(float))).astype(np.int64) % p
    return np.convolve(a, b) % p


def _trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


class Poly:
    """Element of F_q[t]; ``coeffs[i]`` is the code of the t^i coefficient."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: FieldConfig, coeffs=()):
        self.field = field
        self.coeffs = _trim(int(c) for c in coeffs)

    @classmethod
    def monomial(cls, field, k: int, c: int = 1):
        return cls(field, [0] * k + [c])

    @classmethod
    def const(cls, field, c: int):
        return cls(field, [c])

    @classmethod
    def t(cls, field):
        return cls(field, [0, 1])

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    @property
    def lc(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def coeff(self, k: int) -> int:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def eval0(self) -> int:
        return self.coeff(0)

    @property
    def valuation(self):
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return math.inf

    def _lift(self, other):
        if isinstance(other, Poly):
            self.field.check(other.field)
            return other
        if isinstance(other, FieldElement):
            return Poly(self.field, [other.code])
        if isinstance(other, int):
            return Poly(self.field, [self.field.embed(other)])
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        F = self.field
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = F.add(out[i], c)
        return Poly(F, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.field, [self.field.neg(c) for c in self.coeffs])

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return Poly(self.field, convolve(self.field, self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def scale(self, c: int) -> "Poly":
        F = self.field
        return Poly(F, [F.mul(c, x) for x in self.coeffs])

    def shift(self, k: int) -> "Poly":
        """Multiply by t^k."""
        if not self.coeffs:
            return self
        return Poly(self.field, [0] * k + list(self.coeffs))

    def __pow__(self, n: int):
        result = Poly.const(self.field, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __divmod__(self, other):
        other = self._lift(other)
        if not other.coeffs:
            raise ZeroDivisionError("polynomial division by zero")
        F = self.field
        rem = list(self.coeffs)
        dd = len(other.coeffs) - 1
        inv = F.inv(other.lc)
        if len(rem) - 1 < dd:
            return Poly(F), self
        quot = [0] * (len(rem) - dd)
        for k in range(len(rem) - 1, dd - 1, -1):
            c = F.mul(rem[k], inv)
            if c:
                quot[k - dd] = c
                for i, y in enumerate(other.coeffs):
                    rem[k - dd + i] = F.sub(rem[k - dd + i], F.mul(c, y))
        return Poly(F, quot), Poly(F, rem[:dd])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self) -> "Poly":
        if not self.coeffs:
            return self
        return self.scale(self.field.inv(self.lc))

    def gcd(self, other: "Poly") -> "Poly":
        a, b = self, self._lift(other)
        while b.coeffs:
            a, b = b, a % b
        return a.monic()

    def compose_power(self, k: int) -> "Poly":
        """f(t^k); for k = q this is the Frobenius image f^q."""
        if not self.coeffs:
            return self
        out = [0] * ((len(self.coeffs) - 1) * k + 1)
        for i, c in enumerate(self.coeffs):
            out[i * k] = c
        return Poly(self.field, out)

    def frobenius(self) -> "Poly":
        return self.compose_power(self.field.q)

    def derivative(self) -> "Poly":
        F = self.field
        return Poly(F, [F.mul(F.embed(i), c) for i, c in enumerate(self.coeffs)][1:])

    def __call__(self, x: int) -> int:
        F = self.field
        acc = 0
        for c in reversed(self.coeffs):
            acc = F.add(F.mul(acc, x), c)
        return acc

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.field == other.field and self.coeffs == other.coeffs
        if isinstance(other, int):
            return self == self._lift(other)
        return NotImplemented

    def __hash__(self):
        return hash(("Poly", self.field, self.coeffs))

    def __repr__(self):
        return f"Poly({format_poly(self)})"


class RatFunc:
    """Element of F_q(t), kept with monic denominator and coprime parts."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None, *, normalized: bool = False):
        if den is None:
            den = Poly.const(num.field, 1)
        num.field.check(den.field)
        if not den.coeffs:
            raise ZeroDivisionError("rational function with zero denominator")
        if not normalized:
            if not num.coeffs:
                den = Poly.const(num.field, 1)
            else:
                g = num.gcd(den)
                if g.degree > 0:
                    num, den = num // g, den // g
                lc = den.lc
                if lc != 1:
                    inv = num.field.inv(lc)
                    num, den = num.scale(inv), den.scale(inv)
        self.num = num
        self.den = den

    @property
    def field(self) -> FieldConfig:
        return self.num.field

    @classmethod
    def const(cls, field, c: int):
        return cls(Poly.const(field, c))

    @classmethod
    def zero(cls, field):
        return cls(Poly(field))

    @classmethod
    def one(cls, field):
        return cls(Poly.const(field, 1))

    def normalize(self) -> "RatFunc":
        return RatFunc(self.num, self.den)

    def is_zero(self) -> bool:
        return not self.num.coeffs

    def __bool__(self):
        return bool(self.num.coeffs)

    def _lift(self, other):
        if isinstance(other, RatFunc):
            self.field.check(other.field)
            return other
        if isinstance(other, Poly):
            return RatFunc(other)
        if isinstance(other, (int, FieldElement)):
            return RatFunc(Poly(self.field) + other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, normalized=True)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inv(self) -> "RatFunc":
        if not self.num.coeffs:
            raise ZeroDivisionError("inverse of zero rational function")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self * other.inv()

    def __rtruediv__(self, other):
        return self.inv() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        return RatFunc(self.num**n, self.den**n, normalized=True)

    def frobenius(self) -> "RatFunc":
        return RatFunc(self.num.frobenius(), self.den.frobenius(), normalized=True)

    def eval0(self) -> int:
        if self.den.eval0() == 0:
            raise ZeroDivisionError("rational function has a pole at 0")
        F = self.field
        return F.div(self.num.eval0(), self.den.eval0())

    @property
    def valuation(self):
        """Order of vanishing at t = 0 (negative for a pole)."""
        if not self.num.coeffs:
            return math.inf
        return self.num.valuation - self.den.valuation

    def pole_order(self) -> int:
        v = self.valuation
        return 0 if v == math.inf or v >= 0 else -v

    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def to_series(self, precision: int, shift: int = 0) -> "TruncSeries":
        """Expansion of t^shift * self; requires the result to be pole-free."""
        F = self.field
        dv = self.den.valuation
        if not self.num.coeffs:
            return TruncSeries(F, [], precision)
        if shift - dv + self.num.valuation < 0:
            raise ZeroDivisionError("rational function has a pole at 0")
        den = Poly(F, self.den.coeffs[dv:])
        num = self.num
        k = shift - dv
        if k >= 0:
            num = num.shift(k)
        else:
            num = Poly(F, num.coeffs[-k:])
        inv = TruncSeries.from_poly(den, precision).inverse()
        return TruncSeries.from_poly(num, precision) * inv

    def __eq__(self, other):
        if isinstance(other, RatFunc):
            return self.num == other.num and self.den == other.den
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self == other

    def __hash__(self):
        return hash(("RatFunc", self.num, self.den))

    def __repr__(self):
        return f"RatFunc({format_ratfunc(self)})"


class TruncSeries:
    """A power series known modulo t^precision."""

    __slots__ = ("field", "coeffs", "precision")

    def __init__(self, field: FieldConfig, coeffs, precision: int):
        coeffs = [int(c) for c in coeffs[:precision]]
        coeffs += [0] * (precision - len(coeffs))
        self.field = field
        self.coeffs = tuple(coeffs)
        self.precision = precision

    @classmethod
    def from_poly(cls, f: Poly, precision: int):
        return cls(f.field, f.coeffs, precision)

    @classmethod
    def zero(cls, field, precision):
        return cls(field, [], precision)

    def coeff(self, k: int) -> int:
        if k >= self.precision:
            raise IndexError(f"coefficient {k} beyond precision {self.precision}")
        return self.coeffs[k] if k >= 0 else 0

    @property
    def valuation(self):
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return math.inf

    def truncate(self, precision: int) -> "TruncSeries":
        return TruncSeries(self.field, self.coeffs, min(precision, self.precision))

    def to_poly(self) -> Poly:
        return Poly(self.field, self.coeffs)

    def _lift(self, other):
        if isinstance(other, TruncSeries):
            self.field.check(other.field)
            return other
        if isinstance(other, Poly):
            return TruncSeries.from_poly(other, self.precision)
        if isinstance(other, RatFunc):
            return other.to_series(self.precision)
        if isinstance(other, (int, FieldElement)):
            return TruncSeries.from_poly(Poly(self.field) + other, self.precision)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        n = min(self.precision, other.precision)
        F = self.field
        out = F.vadd(np.array(self.coeffs[:n], dtype=np.int64), np.array(other.coeffs[:n], dtype=np.int64))
        return TruncSeries(F, out.tolist(), n)

    __radd__ = __add__

    def __neg__(self):
        F = self.field
        return TruncSeries(F, F.vneg(np.array(self.coeffs, dtype=np.int64)).tolist(), self.precision)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        # a factor with valuation v lets the product be known v places further
        va, vb = self.valuation, other.valuation
        n = min(self.precision + (vb if vb != math.inf else other.precision),
                other.precision + (va if va != math.inf else self.precision))
        return TruncSeries(self.field, convolve(self.field, self.coeffs, other.coeffs, n), n)

    __rmul__ = __mul__

    def scale(self, c: int) -> "TruncSeries":
        F = self.field
        return TruncSeries(F, F.vmul(np.array(self.coeffs, dtype=np.int64), c).tolist(), self.precision)

    def shift(self, k: int) -> "TruncSeries":
        """Multiply by t^k (k >= 0) or divide by t^-k (exact division required)."""
        if k >= 0:
            return TruncSeries(self.field, [0] * k + list(self.coeffs), self.precision + k)
        if any(self.coeffs[: -k]):
            raise ZeroDivisionError("series not divisible by the requested power of t")
        return TruncSeries(self.field, self.coeffs[-k:], self.precision + k)

    def __pow__(self, n: int):
        result = TruncSeries(self.field, [1], self.precision)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> "TruncSeries":
        """1/self for a unit series, by Newton iteration g <- g(2 - u g)."""
        F = self.field
        if not self.coeffs or self.coeffs[0] == 0:
            raise ZeroDivisionError("series is not a unit")
        n = self.precision
        g = TruncSeries(F, [F.inv(self.coeffs[0])], 1)
        prec = 1
        while prec < n:
            prec = min(2 * prec, n)
            u = self.truncate(prec)
            g = TruncSeries(F, g.coeffs, prec)
            ug = u * g
            corr = (TruncSeries(F, [F.embed(2)], prec) - ug.truncate(prec))
            g = (g * corr).truncate(prec)
        return g

    def __truediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        v = other.valuation
        if v == math.inf:
            raise ZeroDivisionError("division by zero series")
        num = self.shift(-v)
        den = other.shift(-v)
        n = min(num.precision, den.precision)
        return num.truncate(n) * den.truncate(n).inverse()

    def frobenius(self) -> "TruncSeries":
        """self^q = self(t^q), known to q times the precision."""
        q = self.field.q
        out = [0] * (q * self.precision)
        for i, c in enumerate(self.coeffs):
            out[q * i] = c
        return TruncSeries(self.field, out, q * self.precision)

    def compose_power(self, k: int) -> "TruncSeries":
        out = [0] * (k * self.precision)
        for i, c in enumerate(self.coeffs):
            out[k * i] = c
        return TruncSeries(self.field, out, k * self.precision)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, TruncSeries):
            return (self.field == other.field and self.precision == other.precision
                    and self.coeffs == other.coeffs)
        return NotImplemented

    def __hash__(self):
        return hash(("TruncSeries", self.field, self.coeffs, self.precision))

    def agrees(self, other: "TruncSeries") -> bool:
        n = min(self.precision, other.precision)
        return self.coeffs[:n] == other.coeffs[:n]

    def __repr__(self):
        return f"TruncSeries({format_poly(self.to_poly())} + O(t^{self.precision}))"


class BiPoly:
    """Polynomial in X with coefficients in F_q[t]: ``coeffs[j]`` multiplies X^j."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: FieldConfig, coeffs):
        coeffs = list(coeffs)
        for c in coeffs:
            field.check(c.field)
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        self.field = field
        self.coeffs = tuple(coeffs)

    @property
    def deg_x(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    @property
    def deg_t(self):
        return max((c.degree for c in self.coeffs), default=NEG_INF)

    def coeff(self, j: int) -> Poly:
        return self.coeffs[j] if 0 <= j < len(self.coeffs) else Poly(self.field)

    def derivative(self) -> "BiPoly":
        F = self.field
        return BiPoly(F, [c.scale(F.embed(j)) for j, c in enumerate(self.coeffs)][1:])

    def __call__(self, x: TruncSeries) -> TruncSeries:
        """Evaluate at a series root candidate by Horner's rule."""
        acc = TruncSeries.zero(self.field, x.precision)
        for c in reversed(self.coeffs):
            acc = (acc * x).truncate(x.precision) + TruncSeries.from_poly(c, x.precision)
        return acc

    def is_zero(self) -> bool:
        return not self.coeffs

    def scale(self, f: Poly) -> "BiPoly":
        return BiPoly(self.field, [c * f for c in self.coeffs])

    def monic_normalized(self) -> "BiPoly":
        """Scale so the highest nonzero (X-degree, t-degree) coefficient is 1."""
        if not self.coeffs:
            return self
        lc = self.coeffs[-1].lc
        inv = self.field.inv(lc)
        return BiPoly(self.field, [c.scale(inv) for c in self.coeffs])

    def __eq__(self, other):
        if isinstance(other, BiPoly):
            return self.field == other.field and self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(("BiPoly", self.field, self.coeffs))

    def __repr__(self):
        terms = [f"X^{j}*({format_poly(c)})" for j, c in enumerate(self.coeffs) if c]
        return "BiPoly(" + (" + ".join(terms) or "0") + ")"


# -- Cartier operators -----------------------------------------------------------

def cartier(f, r: int):
    """Lambda_r(sum a_n t^n) = sum a_{qn+r} t^n, for Poly, TruncSeries or RatFunc."""
    q = _field_of(f).q
    if not 0 <= r < q:
        raise ValueError(f"digit {r} outside [0, {q})")
    if isinstance(f, Poly):
        return Poly(f.field, f.coeffs[r::q])
    if isinstance(f, TruncSeries):
        D = f.precision
        n = (D - r - 1) // q + 1 if D > r else 0
        return TruncSeries(f.field, f.coeffs[r::q][:n], n)
    if isinstance(f, RatFunc):
        # Lambda_r(N/D) = Lambda_r(N D^{q-1}) / D  since N/D = N D^{q-1} / D^q
        num = cartier(f.num * f.den ** (q - 1), r)
        return RatFunc(num, f.den)
    raise TypeError(f"cannot apply Cartier operator to {type(f).__name__}")


def _field_of(f) -> FieldConfig:
    return f.field


# -- series roots ------------------------------------------------------------------

def series_root(P: BiPoly, prefix: TruncSeries, precision: int) -> TruncSeries:
    """The unique root of P in F_q[[t]] extending ``prefix``, modulo t^precision.

    Uses Newton iteration with the derivative's t-valuation v; uniqueness needs
    the prefix to be longer than v.
    """
    F = P.field
    k = prefix.precision
    dP = P.derivative()
    x0 = prefix
    v = dP(x0).valuation
    if v == math.inf or v >= k:
        raise InseparableError(
            "derivative vanishes to the prefix precision; extension is ambiguous")
    r0 = P(TruncSeries(F, prefix.coeffs, k + 2 * v + 1))
    if r0.valuation < k + v:
        raise NoRootError("no power series root extends the given prefix")
    x = prefix
    correct = k  # x agrees with the root modulo t^correct
    for _ in range(4 * max(precision, 2).bit_length() + 8):
        W = min(2 * correct, precision) + 2 * v + 1
        xw = TruncSeries(F, x.coeffs, W)
        res = P(xw)
        val = res.valuation
        # a residual of valuation v + d means x agrees with the root to t^d
        c = W - v if val == math.inf else val - v
        if c >= precision:
            x = xw
            break
        if c < correct:
            raise NoRootError("Newton iteration lost precision")
        correct = c
        if val == math.inf:
            x = xw
            continue
        num = res.shift(-v)
        den = dP(xw).shift(-v)
        n = min(num.precision, den.precision)
        delta = num.truncate(n) * den.truncate(n).inverse()
        x = xw.truncate(n) - delta.truncate(n)
    else:
        raise NoRootError("Newton iteration did not converge")
    return x.truncate(precision)


# -- text encodings ------------------------------------------------------------------

def format_poly(f: Poly, var: str = "t") -> str:
    F = f.field
    terms = []
    for i, c in enumerate(f.coeffs):
        if not c:
            continue
        cs = F.format(c)
        if i == 0:
            terms.append(cs)
        else:
            mono = var if i == 1 else f"{var}^{i}"
            terms.append(mono if c == 1 else f"{cs}*{mono}")
    return " + ".join(terms) if terms else "0"


def format_ratfunc(f: RatFunc) -> str:
    if f.den.degree == 0:
        return f"({format_poly(f.num)})"
    return f"({format_poly(f.num)})/({format_poly(f.den)})"


_TERM = re.compile(r"^(?:(?P<coef>\[[^\]]*\]|-?\d+)\s*\*?\s*)?(?:(?P<var>[a-zA-Z])(?:\^(?P<exp>\d+))?)?$")


def parse_poly(field: FieldConfig, text: str, var: str = "t") -> Poly:
    """Parse ``1 + t + [0,1]*t^3`` or the sparse form ``0:1 1:1 3:[0,1]``."""
    text = text.strip()
    if not text:
        raise FormatError("empty polynomial")
    if ":" in text:
        out = Poly(field)
        for tok in text.split():
            try:
                exp, coef = tok.split(":", 1)
                out = out + Poly.monomial(field, int(exp), field.parse(coef))
            except ValueError as exc:
                raise FormatError(f"bad sparse term {tok!r}") from exc
        return out
    out = Poly(field)
    s = text.replace(" ", "").replace("-", "+-")
    for term in s.split("+"):
        if not term:
            continue
        neg = term.startswith("-")
        if neg:
            term = term[1:]
        m = _TERM.match(term)
        if not m or not (m.group("coef") or m.group("var")):
            raise FormatError(f"bad polynomial term {term!r}")
        if m.group("var") and m.group("var") != var:
            raise FormatError(f"unexpected variable {m.group('var')!r}")
        coef = field.parse(m.group("coef")) if m.group("coef") else 1
        if m.group("coef") and m.group("coef").startswith("-"):
            coef = field.embed(int(m.group("coef")))
        exp = 0 if not m.group("var") else int(m.group("exp") or 1)
        mono = Poly.monomial(field, exp, coef)
        out = out - mono if neg else out + mono
    return out


def parse_ratfunc(field: FieldConfig, text: str) -> RatFunc:
    text = text.strip()
    depth = 0
    split = None
    for i, ch in enumerate(text):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch == "/" and depth == 0:
            split = i
    if split is None:
        return RatFunc(parse_poly(field, _strip_parens(text)))
    num = parse_poly(field, _strip_parens(text[:split]))
    den = parse_poly(field, _strip_parens(text[split + 1:]))
    if den.is_zero():
        raise FormatError("zero denominator")
    return RatFunc(num, den)


def _strip_parens(s: str) -> str:
    s = s.strip()
    if s.startswith("(") and s.endswith(")"):
        return s[1:-1]
    return s


def format_bipoly(P: BiPoly) -> str:
    return "\n".join(f"X^{j} : {format_poly(c)}" for j, c in enumerate(P.coeffs) if c)


def parse_bipoly(field: FieldConfig, text: str) -> BiPoly:
    coeffs: dict[int, Poly] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.match(r"^X\^(\d+)\s*:\s*(.+)$", line)
        if not m:
            raise FormatError(f"bad bivariate polynomial line {raw!r}")
        j = int(m.group(1))
        coeffs[j] = coeffs.get(j, Poly(field)) + parse_poly(field, m.group(2))
    if not coeffs:
        raise FormatError("empty bivariate polynomial")
    n = max(coeffs) + 1
    return BiPoly(field, [coeffs.get(j, Poly(field)) for j in range(n)])
