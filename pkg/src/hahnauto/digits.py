"""Exponents in Z[1/p]_{>=0} and their base-p radix-point strings."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering

from .errors import DomainError, FormatError

DIGIT_CHARS = "0123456789abcdefghijklmnopqrstuvwxyz"


def digit_char(d: int) -> str:
    return DIGIT_CHARS[d]


def char_digit(ch: str, p: int) -> int:
    d = DIGIT_CHARS.find(ch.lower())
    if d < 0 or d >= p:
        raise FormatError(f"digit {ch!r} out of range for base {p}")
    return d


def p_power_exponent(den: int, p: int):
    """k with den = p^k, or None."""
    k = 0
    while den % p == 0:
        den //= p
        k += 1
    return k if den == 1 else None


@total_ordering
@dataclass(frozen=True)
class PAdicRational:
    """The nonnegative p-ary rational num / p^kexp, kept canonical."""

    num: int
    kexp: int
    p: int

    def __post_init__(self):
        if self.num < 0 or self.kexp < 0:
            raise DomainError("p-ary rationals here are nonnegative")
        num, k = self.num, self.kexp
        if num == 0:
            k = 0
        while k > 0 and num % self.p == 0:
            num //= self.p
            k -= 1
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "kexp", k)

    @classmethod
    def of(cls, value, p: int) -> "PAdicRational":
        if isinstance(value, PAdicRational):
            if value.p != p:
                raise DomainError(f"base mismatch {value.p} vs {p}")
            return value
        fr = Fraction(value)
        if fr < 0:
            raise DomainError(f"negative exponent {fr}")
        k = p_power_exponent(fr.denominator, p)
        if k is None:
            raise DomainError(f"{fr} is not in Z[1/{p}]")
        return cls(fr.numerator, k, p)

    @property
    def value(self) -> Fraction:
        return Fraction(self.num, self.p**self.kexp)

    def _coerce(self, other):
        if isinstance(other, PAdicRational):
            if other.p != self.p:
                raise DomainError(f"base mismatch {self.p} vs {other.p}")
            return other.value
        return Fraction(other)

    def __eq__(self, other):
        if isinstance(other, PAdicRational):
            return self.p == other.p and self.num == other.num and self.kexp == other.kexp
        try:
            return self.value == Fraction(other)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash(self.value)

    def __lt__(self, other):
        return self.value < self._coerce(other)

    def __add__(self, other):
        return PAdicRational.of(self.value + self._coerce(other), self.p)

    __radd__ = __add__

    def __sub__(self, other):
        return PAdicRational.of(self.value - self._coerce(other), self.p)

    def compare(self, other) -> int:
        a, b = self.value, self._coerce(other)
        return (a > b) - (a < b)

    def scale_by_pk(self, k: int) -> "PAdicRational":
        """Multiply by p^k (k may be negative)."""
        return PAdicRational.of(self.value * Fraction(self.p) ** k, self.p)

    def floor(self) -> int:
        return self.num // self.p**self.kexp

    def frac(self) -> "PAdicRational":
        return PAdicRational(self.num % self.p**self.kexp, self.kexp, self.p)

    def div_exact(self, m: int) -> "PAdicRational":
        """Divide by m; the result must stay in Z[1/p]."""
        return PAdicRational.of(self.value / m, self.p)

    def __repr__(self):
        return format_exponent(self.value, self.p)

    def __str__(self):
        return format_exponent(self.value, self.p)


@dataclass(frozen=True)
class CanonicalString:
    """Digits before and after the radix point, MSD first, both canonical."""

    intpart: tuple[int, ...]
    fracpart: tuple[int, ...]
    p: int

    def __post_init__(self):
        if self.intpart and self.intpart[0] == 0:
            raise FormatError("integer part has a leading zero")
        if self.fracpart and self.fracpart[-1] == 0:
            raise FormatError("fractional part has a trailing zero")

    def __str__(self):
        return "".join(map(digit_char, self.intpart)) + "." + "".join(map(digit_char, self.fracpart))

    def symbols(self) -> list:
        """Input symbols for a radix automaton ('.' stands for the radix point)."""
        return list(self.intpart) + ["."] + list(self.fracpart)


def int_digits_msd(n: int, p: int) -> tuple[int, ...]:
    out = []
    while n:
        out.append(n % p)
        n //= p
    return tuple(reversed(out))


def canon_string(r, p: int) -> CanonicalString:
    r = PAdicRational.of(r, p)
    ip = int_digits_msd(r.floor(), p)
    f = r.frac()
    digits = int_digits_msd(f.num, p) if f.num else ()
    frac = (0,) * (f.kexp - len(digits)) + digits
    return CanonicalString(ip, frac, p)


def parse_string(s: str, p: int) -> PAdicRational:
    """Value of a base-p radix string; leading/trailing zeros are accepted."""
    if s.count(".") > 1:
        raise FormatError(f"more than one radix point in {s!r}")
    ip, _, fp = s.partition(".")
    n = 0
    for ch in ip:
        n = n * p + char_digit(ch, p)
    f = 0
    for ch in fp:
        f = f * p + char_digit(ch, p)
    return PAdicRational.of(Fraction(n) + Fraction(f, p ** len(fp)), p)


# -- text form of exponents -----------------------------------------------------

_EXP_RE = re.compile(r"^\s*(\d+)\s*(?:/\s*(\d+)\s*(?:\^\s*(\d+))?)?\s*$")


def parse_exponent(text: str, p: int | None = None) -> Fraction:
    """``7/2^3``, ``7/8`` or ``3`` -> Fraction."""
    text = text.strip()
    if text in ("inf", "infinity"):
        return math.inf
    m = _EXP_RE.match(text)
    if not m:
        raise FormatError(f"bad exponent {text!r}")
    num = int(m.group(1))
    if m.group(2) is None:
        return Fraction(num)
    base = int(m.group(2))
    if m.group(3) is not None:
        if p is not None and base != p:
            raise FormatError(f"exponent base {base} differs from p={p}")
        den = base ** int(m.group(3))
    else:
        den = base
    if den == 0:
        raise FormatError("zero denominator in exponent")
    return Fraction(num, den)


def format_exponent(value, p: int) -> str:
    if value == math.inf:
        return "inf"
    fr = Fraction(value)
    if fr.denominator == 1:
        return str(fr.numerator)
    k = p_power_exponent(fr.denominator, p)
    if k is None:
        return f"{fr.numerator}/{fr.denominator}"
    return f"{fr.numerator}/{p}^{k}"


# -- S_{a,b,c} ----------------------------------------------------------------------

@dataclass(frozen=True)
class SabcParams:
    a: int
    b: int
    c: int

    def __post_init__(self):
        if self.a < 1 or self.b < 0 or self.c < 0:
            raise ValueError("need a >= 1, b >= 0, c >= 0")


@dataclass(frozen=True)
class SabcWitness:
    n: int
    digits: tuple[int, ...]  # b_1, b_2, ... of n - a*r


def sabc_contains(r, params: SabcParams, p: int):
    """Is r in S_{a,b,c}?  Returns (bool, witness or None).

    a*r = n - sum b_i p^{-i} with a finite digit sum forces n = ceil(a*r), so
    the digits are read off the base-p expansion of ceil(a*r) - a*r.
    """
    s = Fraction(a_mul(params.a, r))
    if s < 0:
        return False, None
    if p_power_exponent(s.denominator, p) is None:
        return False, None
    n = math.ceil(s)
    gap = PAdicRational.of(n - s, p)
    digits = canon_string(gap, p).fracpart
    witness = SabcWitness(n, digits)
    ok = sum(digits) <= params.c and n >= -params.b
    return ok, witness


def a_mul(a: int, r) -> Fraction:
    if isinstance(r, PAdicRational):
        return a * r.value
    return a * Fraction(r)
