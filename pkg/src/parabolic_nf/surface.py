"""Admissible defining functions r(z, zbar) and the generator family.

A surface p = 2 z zbar + zbar^2 + r_z(z, zbar) is described by the
polynomial r = sum r_ij z^i zbar^j with 4 <= i + j <= N.  Admissibility
means the reality condition r_ji = conj(r_ij) together with the vanishing
of r_{z zbar}(z, -z).

Two degree conventions coexist: the total degree of a homogeneous slice, and
the slice index k with total degree k + 2.  Accessors for both are provided
(``slice`` / ``slice_index``) so call sites never convert by hand.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Iterable

from .errors import SurfaceInputError
from .exactnum import (ONE, ZERO, GaussRational, i_power, rational_to_json, root_at_most,
                       root_exceeds, root_value, to_rational)
from .fps import Series2, partial_derivative

MIN_DEGREE = 4
ZW = ("z", "w")


def index_to_degree(k: int) -> int:
    """Slice index k corresponds to homogeneous total degree k + 2."""
    return k + 2


def degree_to_index(d: int) -> int:
    return d - 2


@dataclass(frozen=True)
class Violation:
    kind: str          # "reality" | "low-degree" | "lagrangian" | "truncation"
    where: object      # (i, j) or a total degree
    message: str

    def to_json(self) -> dict:
        where = list(self.where) if isinstance(self.where, tuple) else self.where
        return {"kind": self.kind, "where": where, "message": self.message}


@dataclass(frozen=True)
class Surface:
    trunc: int
    coeffs: dict = field(default_factory=dict)   # {(i, j): GaussRational}, nonzero only
    epsilon: object = None

    def __post_init__(self):
        clean = {}
        for (i, j), c in self.coeffs.items():
            c = GaussRational.coerce(c)
            if c:
                clean[(int(i), int(j))] = c
        object.__setattr__(self, "coeffs", clean)
        if self.epsilon is not None:
            object.__setattr__(self, "epsilon", to_rational(self.epsilon))

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, trunc: int) -> "Surface":
        return cls(trunc, {})

    @classmethod
    def from_terms(cls, trunc: int, terms, fill_reality: bool = True, epsilon=None) -> "Surface":
        """Terms as ``{(i, j): c}``; with ``fill_reality`` the mirror (j, i)
        receives conj(c) unless it is listed too."""
        coeffs = {(int(i), int(j)): GaussRational.coerce(c) for (i, j), c in dict(terms).items()}
        if fill_reality:
            for (i, j), c in list(coeffs.items()):
                coeffs.setdefault((j, i), c.conjugate())
        return cls(trunc, coeffs, epsilon)

    # -- accessors --------------------------------------------------------
    def coeff(self, i: int, j: int) -> GaussRational:
        return self.coeffs.get((i, j), ZERO)

    def degrees(self) -> list:
        return sorted({i + j for i, j in self.coeffs})

    def is_zero(self) -> bool:
        return not self.coeffs

    def slice(self, degree: int) -> "Surface":
        """Homogeneous part of total degree ``degree``."""
        return Surface(self.trunc, {k: c for k, c in self.coeffs.items() if sum(k) == degree},
                       self.epsilon)

    def slice_index(self, k: int) -> "Surface":
        return self.slice(index_to_degree(k))

    def truncated(self, degree: int) -> "Surface":
        """[r] up to total degree ``degree`` (higher slices zeroed)."""
        return Surface(self.trunc, {k: c for k, c in self.coeffs.items() if sum(k) <= degree},
                       self.epsilon)

    def truncated_index(self, k: int) -> "Surface":
        return self.truncated(index_to_degree(k))

    def with_trunc(self, trunc: int) -> "Surface":
        return Surface(trunc, {k: c for k, c in self.coeffs.items() if sum(k) <= trunc},
                       self.epsilon)

    def __add__(self, other: "Surface") -> "Surface":
        coeffs = dict(self.coeffs)
        for k, c in other.coeffs.items():
            coeffs[k] = coeffs.get(k, ZERO) + c
        return Surface(max(self.trunc, other.trunc), coeffs, self.epsilon)

    def __sub__(self, other: "Surface") -> "Surface":
        return self + other.scaled(-1)

    def scaled(self, c) -> "Surface":
        c = GaussRational.coerce(c)
        return Surface(self.trunc, {k: v * c for k, v in self.coeffs.items()}, self.epsilon)

    def __eq__(self, other):
        if not isinstance(other, Surface):
            return NotImplemented
        return self.trunc == other.trunc and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.trunc, tuple(sorted(self.coeffs.items(), key=lambda kv: kv[0]))))

    # -- series views (variables (z, w), w standing for zbar) ---------------
    def as_series(self, N: int) -> Series2:
        return Series2.from_terms(self.coeffs, N, ZW)

    def r_zbar(self, N: int) -> Series2:
        """d r / d zbar as a polynomial series of truncation N."""
        return partial_derivative(self.as_series(N + 1), 1)

    def r_z(self, N: int) -> Series2:
        return partial_derivative(self.as_series(N + 1), 0)

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        terms = [{"i": i, "j": j, "c": c.to_json()}
                 for (i, j), c in sorted(self.coeffs.items(), key=lambda kv: (sum(kv[0]), kv[0][0]))]
        out = {"trunc": self.trunc, "terms": terms}
        if self.epsilon is not None:
            out["epsilon"] = rational_to_json(self.epsilon)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "Surface":
        """Parse the surface file format; mirrors are filled by reality and
        listed mirrors must agree with it."""
        if not isinstance(data, dict):
            raise SurfaceInputError("surface file must hold a JSON object")
        unknown = set(data) - {"trunc", "epsilon", "terms"}
        if unknown:
            raise SurfaceInputError(f"unknown surface fields {sorted(unknown)}")
        try:
            trunc = int(data["trunc"])
            eps = to_rational(data["epsilon"]) if data.get("epsilon") is not None else None
            listed = {}
            for t in data.get("terms", []):
                key = (int(t["i"]), int(t["j"]))
                c = GaussRational.from_json(t["c"])
                if key in listed and listed[key] != c:
                    raise SurfaceInputError(f"term {key} listed twice with different values")
                listed[key] = c
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            if isinstance(exc, SurfaceInputError):
                raise
            raise SurfaceInputError(f"malformed surface file: {exc}") from exc
        coeffs = dict(listed)
        for (i, j), c in listed.items():
            mirror = (j, i)
            if mirror in listed:
                if listed[mirror] != c.conjugate():
                    raise SurfaceInputError(
                        f"reality violated between listed terms {(i, j)} and {mirror}")
            else:
                coeffs[mirror] = c.conjugate()
        return cls(trunc, coeffs, eps)

    @classmethod
    def load(cls, path) -> "Surface":
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise SurfaceInputError(f"{path}: not valid JSON ({exc})") from exc
        return cls.from_json(data)


def lagrangian_defect(s: Surface, degree: int) -> GaussRational:
    """sum_{i+j=m} i j (-1)^(j-1) r_ij: the coefficient of z^(m-2) in
    r_{z zbar}(z, -z)."""
    acc = ZERO
    for (i, j), c in s.coeffs.items():
        if i + j == degree and i and j:
            acc = acc + c * (i * j * (1 if (j - 1) % 2 == 0 else -1))
    return acc


def validate(s: Surface) -> list:
    """All reasons why ``s`` is not in the admissible space (empty if it is)."""
    out = []
    for (i, j), c in sorted(s.coeffs.items()):
        if i + j < MIN_DEGREE:
            out.append(Violation("low-degree", (i, j), f"term z^{i} zbar^{j} has degree <= 3"))
        if i + j > s.trunc:
            out.append(Violation("truncation", (i, j), f"term above truncation {s.trunc}"))
        if s.coeff(j, i) != c.conjugate():
            if (i, j) <= (j, i) or (j, i) not in s.coeffs:
                out.append(Violation("reality", (i, j),
                                     f"r_{j}{i} = {s.coeff(j, i)} but conj(r_{i}{j}) = {c.conjugate()}"))
    for m in range(MIN_DEGREE, s.trunc + 1):
        defect = lagrangian_defect(s, m)
        if defect:
            out.append(Violation("lagrangian", m,
                                 f"r_(z zbar)(z,-z) has coefficient {defect} on the degree-{m} slice"))
    return out


def is_admissible(s: Surface) -> bool:
    return not validate(s)


@dataclass(frozen=True)
class Distance:
    """sup |r_ij - s_ij|^(1/(i+j)), kept exactly as the maximising data."""

    witnesses: tuple    # tuple of (degree, |c|^2) for every nonzero difference

    @property
    def value(self) -> float:
        return max((root_value(a, d) for d, a in self.witnesses), default=0.0)

    def __float__(self):
        return self.value

    def at_most(self, t) -> bool:
        return all(root_at_most(a, d, t) for d, a in self.witnesses)

    def at_least(self, t) -> bool:
        if to_rational(t) <= 0:
            return True
        return any(root_exceeds(a, d, t) for d, a in self.witnesses)

    def equals(self, t) -> bool:
        return self.at_most(t) and self.at_least(t)


def metric_d(r: Surface, s: Surface) -> Distance:
    keys = set(r.coeffs) | set(s.coeffs)
    wit = []
    for key in sorted(keys):
        diff = r.coeff(*key) - s.coeff(*key)
        if diff:
            wit.append((sum(key), diff.magnitude_sq()))
    return Distance(tuple(wit))


def generator_e(n: int, eps, trunc: int | None = None) -> Surface:
    """e_{n+2} = eps^(n+2) (i^(n-1) z^n zbar^2 + (-i)^(n-1) zbar^n z^2).

    For n = 2 the two monomials coincide and cancel, giving the zero surface.
    """
    if n < 2:
        raise ValueError("generator index n must be >= 2")
    eps = to_rational(eps)
    scale = GaussRational(eps ** (n + 2))
    coeffs: dict = {}
    for key, unit in (((n, 2), i_power(n - 1)), ((2, n), i_power(n - 1).conjugate())):
        coeffs[key] = coeffs.get(key, ZERO) + unit * scale
    return Surface(n + 2 if trunc is None else trunc, coeffs, eps)


def generator_of_degree(degree: int, eps, trunc: int | None = None) -> Surface:
    """The generator homogeneous of the given total degree (e_degree)."""
    return generator_e(degree - 2, eps, trunc)


def r_star(N: int, eps) -> Surface:
    """sum_{n=4}^{N} e_n, i.e. the family truncated at total degree N."""
    if N < 5:
        raise ValueError("r_star needs N >= 5")
    out = Surface(N, {}, to_rational(eps))
    for degree in range(4, N + 1):
        out = out + generator_of_degree(degree, eps, N)
    return Surface(N, out.coeffs, to_rational(eps))


def random_surface(N: int, rng: random.Random, height: int = 5, density: float = 1.0) -> Surface:
    """An admissible surface with small random Gaussian-rational coefficients.

    Each slice is drawn freely for i >= j, mirrored by reality, and the one
    real Lagrangian constraint of the slice is then met by adjusting r_{m-1,1}.
    """
    coeffs: dict = {}
    for m in range(MIN_DEGREE, N + 1):
        for i in range(m, -1, -1):
            j = m - i
            if i < j:
                break
            if rng.random() > density:
                continue
            re = to_rational(f"{rng.randint(-height, height)}/{rng.randint(1, height)}")
            im = ZERO.re if i == j else to_rational(f"{rng.randint(-height, height)}/{rng.randint(1, height)}")
            c = GaussRational(re, im)
            if c:
                coeffs[(i, j)] = c
                if i != j:
                    coeffs[(j, i)] = c.conjugate()
        s = Surface(N, coeffs)
        defect = lagrangian_defect(s, m)
        if defect:
            # the (m-1, 1) / (1, m-1) pair enters with weight (m-1)(1 + (-1)^m conj)
            key = (m - 1, 1)
            old = coeffs.get(key, ZERO)
            if m % 2 == 0:
                fix = GaussRational(-defect.re / (2 * (m - 1)), 0)
            else:
                # pair contributes (m-1)(c - conj c) = 2i (m-1) Im c
                fix = GaussRational(0, -defect.im / (2 * (m - 1)))
            new = old + fix
            coeffs[key] = new
            coeffs[(1, m - 1)] = new.conjugate()
    return Surface(N, coeffs)
