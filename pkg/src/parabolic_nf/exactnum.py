"""Exact scalars over the Gaussian rationals Q(i) and the z/(e^z - 1) table.

Rationals are ``gmpy2.mpq`` values, which are always stored in lowest terms
with a positive denominator.  ``GaussRational`` wraps a pair of them and is
immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Union

import gmpy2
from gmpy2 import mpq, mpz

RationalLike = Union[int, Fraction, "mpq", str]

ZERO_Q = mpq(0)
ONE_Q = mpq(1)


def to_rational(value) -> mpq:
    """Coerce ints, Fractions, mpq, ``"p/q"`` strings or ``[p, q]`` pairs to mpq."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, type(mpz(0)))):
        return mpq(value)
    if isinstance(value, type(ZERO_Q)):
        return value
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            num, den = text.split("/", 1)
            return _checked_ratio(int(num), int(den))
        return mpq(int(text))
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return _checked_ratio(int(value[0]), int(value[1]))
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def _checked_ratio(num: int, den: int) -> mpq:
    if den == 0:
        raise ZeroDivisionError("rational with zero denominator")
    return mpq(num, den)


def rational_to_json(q) -> list[str]:
    q = to_rational(q)
    return [str(q.numerator), str(q.denominator)]


def rational_from_json(pair) -> mpq:
    return to_rational(pair)


def rational_log(q) -> float:
    """Natural log of a positive rational of any size, without float overflow."""
    q = to_rational(q)
    if q <= 0:
        raise ValueError("log of a non-positive rational")
    return _int_log(int(q.numerator)) - _int_log(int(q.denominator))


def _int_log(n: int) -> float:
    bits = n.bit_length()
    if bits < 1000:
        return math.log(n)
    shift = bits - 64
    return math.log(n >> shift) + shift * math.log(2)


class GaussRational:
    """An exact complex number ``re + im*i`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: RationalLike = 0, im: RationalLike = 0):
        object.__setattr__(self, "re", to_rational(re))
        object.__setattr__(self, "im", to_rational(im))

    @classmethod
    def _raw(cls, re: mpq, im: mpq) -> "GaussRational":
        obj = object.__new__(cls)
        object.__setattr__(obj, "re", re)
        object.__setattr__(obj, "im", im)
        return obj

    @classmethod
    def coerce(cls, value) -> "GaussRational":
        if isinstance(value, GaussRational):
            return value
        if isinstance(value, complex):
            raise TypeError("floating complex numbers are not exact; pass re/im rationals")
        return cls._raw(to_rational(value), ZERO_Q)

    def __setattr__(self, name, value):
        raise AttributeError("GaussRational is immutable")

    # -- field operations -------------------------------------------------
    def __add__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return GaussRational._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return GaussRational._raw(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        return GaussRational._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        norm = other.re * other.re + other.im * other.im
        if norm == 0:
            raise ZeroDivisionError("division by the zero Gaussian rational")
        a, b, c, d = self.re, self.im, other.re, other.im
        return GaussRational._raw((a * c + b * d) / norm, (b * c - a * d) / norm)

    def __rtruediv__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return other / self

    def __neg__(self):
        return GaussRational._raw(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return (ONE / self) ** (-exponent)
        result, base = ONE, self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    # -- structure --------------------------------------------------------
    def conjugate(self) -> "GaussRational":
        return GaussRational._raw(self.re, -self.im)

    def magnitude_sq(self) -> mpq:
        return self.re * self.re + self.im * self.im

    def is_real(self) -> bool:
        return self.im == 0

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussRational({_fmt(self.re)!r}, {_fmt(self.im)!r})"

    def __str__(self):
        if self.im == 0:
            return _fmt(self.re)
        if self.re == 0:
            return f"{_fmt(self.im)}i"
        sign = "+" if self.im > 0 else "-"
        return f"{_fmt(self.re)}{sign}{_fmt(abs(self.im))}i"

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        return {"re": rational_to_json(self.re), "im": rational_to_json(self.im)}

    @classmethod
    def from_json(cls, data) -> "GaussRational":
        if isinstance(data, dict):
            unknown = set(data) - {"re", "im"}
            if unknown:
                raise ValueError(f"unknown GaussRational fields {sorted(unknown)}")
            return cls(rational_from_json(data.get("re", ["0", "1"])),
                       rational_from_json(data.get("im", ["0", "1"])))
        return cls(to_rational(data))


def _fmt(q: mpq) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _coerce_or_none(value):
    if isinstance(value, GaussRational):
        return value
    try:
        return GaussRational._raw(to_rational(value), ZERO_Q)
    except TypeError:
        return None


ZERO = GaussRational(0)
ONE = GaussRational(1)
I = GaussRational(0, 1)


def conjugate(a: GaussRational) -> GaussRational:
    return GaussRational.coerce(a).conjugate()


def magnitude_sq(a: GaussRational) -> mpq:
    return GaussRational.coerce(a).magnitude_sq()


def i_power(k: int) -> GaussRational:
    """i**k for any integer k."""
    return (ONE, I, -ONE, -I)[k % 4]


def root_exceeds(abs_sq, degree: int, threshold) -> bool:
    """Exact test of ``|c|**(1/degree) >= threshold`` given ``abs_sq = |c|**2``."""
    t = to_rational(threshold)
    if t <= 0:
        return True
    return to_rational(abs_sq) >= t ** (2 * degree)


def root_at_most(abs_sq, degree: int, threshold) -> bool:
    """Exact test of ``|c|**(1/degree) <= threshold``."""
    t = to_rational(threshold)
    if t < 0:
        return False
    return to_rational(abs_sq) <= t ** (2 * degree)


def root_value(abs_sq, degree: int) -> float:
    """Float report of ``|c|**(1/degree)`` from the exact squared magnitude."""
    abs_sq = to_rational(abs_sq)
    if abs_sq == 0:
        return 0.0
    return math.exp(rational_log(abs_sq) / (2 * degree))


# -- the Bernoulli-type table -------------------------------------------------

@dataclass(frozen=True)
class BernoulliTable:
    """Coefficients beta_0..beta_K of E(z) = z/(e^z - 1) = sum beta_k z^k."""

    betas: tuple

    @property
    def degree(self) -> int:
        return len(self.betas) - 1

    def __getitem__(self, k: int) -> mpq:
        return self.betas[k]

    def __len__(self) -> int:
        return len(self.betas)

    def check(self) -> bool:
        """True if E(z)(e^z - 1) = z holds through degree K+1."""
        K = self.degree
        for m in range(K + 2):
            acc = ZERO_Q
            for j in range(min(m, K + 1)):
                acc += self.betas[j] / gmpy2.fac(m - j)
            if acc != (ONE_Q if m == 1 else ZERO_Q):
                return False
        return True


@lru_cache(maxsize=None)
def _betas(K: int) -> tuple:
    betas = [ONE_Q]
    for k in range(1, K + 1):
        acc = ZERO_Q
        for j in range(k):
            acc += betas[j] / gmpy2.fac(k + 1 - j)
        betas.append(-acc)
    return tuple(betas)


def bernoulli_coeffs(K: int) -> BernoulliTable:
    """Exact beta_k for k <= K, solved degree by degree from E(z)(e^z - 1) = z."""
    if K < 0:
        raise ValueError("K must be non-negative")
    return BernoulliTable(_betas(K))


def gauss_sum(values: Iterable[GaussRational]) -> GaussRational:
    re, im = ZERO_Q, ZERO_Q
    for v in values:
        re += v.re
        im += v.im
    return GaussRational._raw(re, im)
