"""Truncated bivariate power series over Q(i) and formal map germs.

A ``Series2`` of truncation ``N`` is an element of C[[x, y]] modulo the
(N+1)-st power of the maximal ideal.  Coefficients live in a dense
triangular table ordered by total degree and then by the x-exponent, i.e.
the monomial x^i y^j sits at ``d(d+1)/2 + i`` with ``d = i + j``.  Real and
imaginary parts are held in two parallel lists of ``mpq`` so that the
product and composition kernels never allocate a ``GaussRational``.

Binary operations between series of different truncations reduce to the
smaller one.  Nothing is ever stored above the truncation degree.
"""

from __future__ import annotations

from math import comb
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from gmpy2 import mpq

from .errors import ConsistencyError
from .exactnum import ONE, ZERO, ZERO_Q, GaussRational, to_rational

__all__ = [
    "Series2",
    "MapGerm",
    "mul",
    "compose",
    "map_compose",
    "map_inverse",
    "implicit_solve",
    "divided_difference",
    "partial_derivative",
    "conj_twist",
    "substitute_linear",
    "power_table",
    "compose_with_table",
]


def _idx(i: int, j: int) -> int:
    d = i + j
    return d * (d + 1) // 2 + i


def _size(N: int) -> int:
    return (N + 1) * (N + 2) // 2


_MONOMIALS: list = []


def _monomials(N: int) -> list:
    """(d, i, j) for every table slot up to degree N, in storage order."""
    if len(_MONOMIALS) < _size(N):
        _MONOMIALS.clear()
        for d in range(N + 1):
            for i in range(d + 1):
                _MONOMIALS.append((d, i, d - i))
    return _MONOMIALS


class Series2:
    """Truncated formal power series in two variables with Q(i) coefficients."""

    __slots__ = ("trunc", "_re", "_im", "var_names")

    def __init__(self, trunc: int, re: list, im: list, var_names=("x", "y")):
        if trunc < 0:
            raise ValueError("truncation degree must be non-negative")
        size = _size(trunc)
        if len(re) != size or len(im) != size:
            raise ValueError("coefficient table does not match truncation")
        self.trunc = trunc
        self._re = re
        self._im = im
        self.var_names = tuple(var_names)

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, trunc: int, var_names=("x", "y")) -> "Series2":
        n = _size(trunc)
        return cls(trunc, [ZERO_Q] * n, [ZERO_Q] * n, var_names)

    @classmethod
    def from_terms(cls, terms, trunc: int, var_names=("x", "y")) -> "Series2":
        """Build from ``{(i, j): coeff}`` or an iterable of ``(i, j, coeff)``.

        Terms above ``trunc`` are discarded (graded-quotient semantics).
        """
        out = cls.zero(trunc, var_names)
        items = terms.items() if isinstance(terms, Mapping) else (((i, j), c) for i, j, c in terms)
        for (i, j), c in items:
            if i < 0 or j < 0:
                raise ValueError(f"negative exponent in term {(i, j)}")
            if i + j > trunc:
                continue
            c = GaussRational.coerce(c)
            k = _idx(i, j)
            out._re[k] += c.re
            out._im[k] += c.im
        return out

    @classmethod
    def constant(cls, value, trunc: int, var_names=("x", "y")) -> "Series2":
        return cls.from_terms({(0, 0): value}, trunc, var_names)

    @classmethod
    def variable(cls, which: int, trunc: int, var_names=("x", "y")) -> "Series2":
        return cls.from_terms({(1, 0) if which == 0 else (0, 1): 1}, trunc, var_names)

    def _like(self, trunc: int | None = None) -> "Series2":
        return Series2.zero(self.trunc if trunc is None else trunc, self.var_names)

    # -- access -----------------------------------------------------------
    def coeff(self, i: int, j: int) -> GaussRational:
        if i < 0 or j < 0 or i + j > self.trunc:
            return ZERO
        k = _idx(i, j)
        return GaussRational._raw(self._re[k], self._im[k])

    def __getitem__(self, key) -> GaussRational:
        return self.coeff(*key)

    def terms(self) -> Iterator[tuple]:
        """Nonzero terms ``(i, j, coeff)`` sorted by (i + j, i)."""
        for (d, i, j), re, im in zip(_monomials(self.trunc), self._re, self._im):
            if re or im:
                yield i, j, GaussRational._raw(re, im)

    def _nonzero(self) -> list:
        return [(d, i, j, re, im)
                for (d, i, j), re, im in zip(_monomials(self.trunc), self._re, self._im)
                if re or im]

    def to_dict(self) -> dict:
        return {(i, j): c for i, j, c in self.terms()}

    def is_zero(self) -> bool:
        return not any(self._re) and not any(self._im)

    def is_real(self) -> bool:
        return not any(self._im)

    def lowest_degree(self) -> int | None:
        for (d, _, _), re, im in zip(_monomials(self.trunc), self._re, self._im):
            if re or im:
                return d
        return None

    def degree(self) -> int | None:
        """Highest total degree carrying a nonzero coefficient."""
        best = None
        for d, _, _, _, _ in self._nonzero():
            best = d
        return best

    def homogeneous(self, d: int) -> "Series2":
        out = self._like()
        if 0 <= d <= self.trunc:
            lo, hi = _idx(0, d), _idx(d, 0) + 1
            out._re[lo:hi] = self._re[lo:hi]
            out._im[lo:hi] = self._im[lo:hi]
        return out

    def truncate(self, N: int) -> "Series2":
        """Drop everything above degree N.  Raising the truncation is allowed
        only by ``as_polynomial``."""
        if N > self.trunc:
            raise ValueError("cannot raise truncation of a series; use as_polynomial")
        n = _size(N)
        return Series2(N, self._re[:n], self._im[:n], self.var_names)

    def as_polynomial(self, N: int) -> "Series2":
        """Reinterpret the stored terms as an exact polynomial at truncation N."""
        if N <= self.trunc:
            return self.truncate(N)
        n = _size(N) - _size(self.trunc)
        return Series2(N, self._re + [ZERO_Q] * n, self._im + [ZERO_Q] * n, self.var_names)

    def with_names(self, var_names) -> "Series2":
        return Series2(self.trunc, self._re, self._im, var_names)

    # -- ring operations --------------------------------------------------
    def _check_names(self, other: "Series2"):
        if self.var_names != other.var_names:
            raise ValueError(f"incompatible variables {self.var_names} vs {other.var_names}")

    def __add__(self, other):
        if not isinstance(other, Series2):
            other = Series2.constant(other, self.trunc, self.var_names)
        self._check_names(other)
        N = min(self.trunc, other.trunc)
        n = _size(N)
        return Series2(N, [a + b for a, b in zip(self._re[:n], other._re[:n])],
                       [a + b for a, b in zip(self._im[:n], other._im[:n])], self.var_names)

    __radd__ = __add__

    def __neg__(self):
        return Series2(self.trunc, [-a for a in self._re], [-a for a in self._im], self.var_names)

    def __sub__(self, other):
        if not isinstance(other, Series2):
            other = Series2.constant(other, self.trunc, self.var_names)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Series2):
            return mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c) -> "Series2":
        c = GaussRational.coerce(c)
        cr, ci = c.re, c.im
        if ci == 0:
            return Series2(self.trunc, [a * cr for a in self._re], [a * cr for a in self._im],
                           self.var_names)
        re = [a * cr - b * ci for a, b in zip(self._re, self._im)]
        im = [a * ci + b * cr for a, b in zip(self._re, self._im)]
        return Series2(self.trunc, re, im, self.var_names)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = Series2.constant(1, self.trunc, self.var_names)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, Series2):
            return NotImplemented
        return (self.trunc == other.trunc and self._re == other._re and self._im == other._im)

    def __hash__(self):
        return hash((self.trunc, tuple(self._re), tuple(self._im)))

    def equal_to_degree(self, other: "Series2", N: int) -> bool:
        n = _size(N)
        if N > min(self.trunc, other.trunc):
            raise ValueError("comparison degree exceeds truncation")
        return self._re[:n] == other._re[:n] and self._im[:n] == other._im[:n]

    def first_nonzero_degree_of_difference(self, other: "Series2") -> int | None:
        return (self - other).lowest_degree()

    def conj(self) -> "Series2":
        """Conjugate every coefficient (the 'bar' of a function)."""
        return Series2(self.trunc, list(self._re), [-a for a in self._im], self.var_names)

    # -- x-shifts and restrictions ----------------------------------------
    def divide_by_x(self) -> "Series2":
        """Exact quotient by x; raises ConsistencyError on a nonzero remainder."""
        for d, i, j, _, _ in self._nonzero():
            if i == 0:
                raise ConsistencyError(f"series not divisible by x: term y^{j}", d)
        N = max(self.trunc - 1, 0)
        out = Series2.zero(N, self.var_names)
        for d, i, j, re, im in self._nonzero():
            k = _idx(i - 1, j)
            out._re[k] = re
            out._im[k] = im
        return out

    def multiply_by_x(self) -> "Series2":
        out = Series2.zero(self.trunc + 1, self.var_names)
        for d, i, j, re, im in self._nonzero():
            k = _idx(i + 1, j)
            out._re[k] = re
            out._im[k] = im
        return out

    def restrict_y0(self) -> list:
        """Coefficients of x^0..x^N after setting y = 0."""
        return [self.coeff(i, 0) for i in range(self.trunc + 1)]

    def restrict_x0(self) -> list:
        return [self.coeff(0, j) for j in range(self.trunc + 1)]

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        return {"trunc": self.trunc,
                "terms": [{"i": i, "j": j, "c": c.to_json()} for i, j, c in self.terms()]}

    @classmethod
    def from_json(cls, data: dict, var_names=("x", "y")) -> "Series2":
        unknown = set(data) - {"trunc", "terms"}
        if unknown:
            raise ValueError(f"unknown series fields {sorted(unknown)}")
        trunc = int(data["trunc"])
        terms = {}
        for t in data["terms"]:
            key = (int(t["i"]), int(t["j"]))
            if key[0] + key[1] > trunc:
                raise ValueError(f"term {key} exceeds truncation {trunc}")
            terms[key] = terms.get(key, ZERO) + GaussRational.from_json(t["c"])
        return cls.from_terms(terms, trunc, var_names)

    def __repr__(self):
        x, y = self.var_names
        parts = []
        for i, j, c in self.terms():
            mono = "*".join(p for p in (_pw(x, i), _pw(y, j)) if p) or "1"
            parts.append(f"({c})*{mono}")
        body = " + ".join(parts) if parts else "0"
        return f"Series2[{self.trunc}]({body})"


def _pw(name: str, k: int) -> str:
    return "" if k == 0 else (name if k == 1 else f"{name}^{k}")


# -- kernels -------------------------------------------------------------------

def mul(f: Series2, g: Series2) -> Series2:
    """Truncated Cauchy product."""
    f._check_names(g)
    N = min(f.trunc, g.trunc)
    out = Series2.zero(N, f.var_names)
    ore, oim = out._re, out._im
    a_terms = f._nonzero()
    b_terms = g._nonzero()
    if not a_terms or not b_terms:
        return out
    real = f.is_real() and g.is_real()
    for da, ia, ja, ar, ai in a_terms:
        lim = N - da
        if lim < 0:
            break
        for db, ib, jb, br, bi in b_terms:
            if db > lim:
                break
            d = da + db
            k = d * (d + 1) // 2 + ia + ib
            if real:
                ore[k] += ar * br
            else:
                ore[k] += ar * br - ai * bi
                oim[k] += ar * bi + ai * br
    return out


def partial_derivative(f: Series2, var: int) -> Series2:
    """d/dx (var=0) or d/dy (var=1); the result keeps truncation N - 1."""
    N = max(f.trunc - 1, 0)
    out = Series2.zero(N, f.var_names)
    for d, i, j, re, im in f._nonzero():
        e = i if var == 0 else j
        if e == 0:
            continue
        k = _idx(i - 1, j) if var == 0 else _idx(i, j - 1)
        out._re[k] = re * e
        out._im[k] = im * e
    return out


def conj_twist(f: Series2, signs: tuple = (1, -1)) -> Series2:
    """The anti-holomorphic pull-back: conjugate coefficients, then substitute
    (s1 x, s2 y).  With signs (1, -1) this is f -> conj(f(conj x, -conj y))."""
    s1, s2 = signs
    if s1 not in (1, -1) or s2 not in (1, -1):
        raise ValueError("signs must be +1 or -1")
    out = Series2.zero(f.trunc, f.var_names)
    for d, i, j, re, im in f._nonzero():
        sign = (s1 ** i) * (s2 ** j)
        k = _idx(i, j)
        out._re[k] = re * sign
        out._im[k] = -im * sign
    return out


def _linear_form_powers(a: GaussRational, b: GaussRational, n: int) -> list:
    """Coefficient lists of (a X + b Y)^k for k <= n, indexed by the X-exponent."""
    pw = [[(mpq(1), ZERO_Q)]]
    for k in range(1, n + 1):
        prev = pw[-1]
        cur = [(ZERO_Q, ZERO_Q)] * (k + 1)
        cur = list(cur)
        for e, (pr, pi) in enumerate(prev):
            # times a X
            r, i_ = cur[e + 1]
            cur[e + 1] = (r + pr * a.re - pi * a.im, i_ + pr * a.im + pi * a.re)
            # times b Y
            r, i_ = cur[e]
            cur[e] = (r + pr * b.re - pi * b.im, i_ + pr * b.im + pi * b.re)
        pw.append(cur)
    return pw


def substitute_linear(f: Series2, matrix, var_names=None) -> Series2:
    """f(a x + b y, c x + d y) for ``matrix = ((a, b), (c, d))``; exact and
    degree-preserving."""
    (a, b), (c, d) = [[GaussRational.coerce(v) for v in row] for row in matrix]
    N = f.trunc
    names = f.var_names if var_names is None else tuple(var_names)
    out = Series2.zero(N, names)
    terms = f._nonzero()
    if not terms:
        return out
    top = max(t[0] for t in terms)
    p1 = _linear_form_powers(a, b, top)
    p2 = _linear_form_powers(c, d, top)
    ore, oim = out._re, out._im
    for deg, i, j, cr, ci in terms:
        A, B = p1[i], p2[j]
        base = deg * (deg + 1) // 2
        for e1, (ar, ai) in enumerate(A):
            if not ar and not ai:
                continue
            tr, ti = cr * ar - ci * ai, cr * ai + ci * ar
            for e2, (br, bi) in enumerate(B):
                if not br and not bi:
                    continue
                k = base + e1 + e2
                ore[k] += tr * br - ti * bi
                oim[k] += tr * bi + ti * br
    return out


class MapGerm:
    """A formal self-map of the plane fixing the origin: (comp1, comp2)."""

    __slots__ = ("comp1", "comp2", "_linear", "_tables")

    def __init__(self, comp1: Series2, comp2: Series2):
        comp1._check_names(comp2)
        N = min(comp1.trunc, comp2.trunc)
        if N < 1:
            raise ValueError("map germs need truncation >= 1")
        comp1, comp2 = comp1.truncate(N), comp2.truncate(N)
        if comp1.coeff(0, 0) or comp2.coeff(0, 0):
            raise ValueError("map germ must fix the origin (zero constant terms)")
        self.comp1 = comp1
        self.comp2 = comp2
        self._linear = ((comp1.coeff(1, 0), comp1.coeff(0, 1)),
                        (comp2.coeff(1, 0), comp2.coeff(0, 1)))
        self._tables = {}

    @property
    def trunc(self) -> int:
        return self.comp1.trunc

    @property
    def var_names(self):
        return self.comp1.var_names

    @property
    def linear_part(self) -> tuple:
        """2x2 matrix ((a, b), (c, d)) with comp1 = a x + b y + ..."""
        return self._linear

    @classmethod
    def linear(cls, matrix, trunc: int, var_names=("x", "y")) -> "MapGerm":
        (a, b), (c, d) = matrix
        return cls(Series2.from_terms({(1, 0): a, (0, 1): b}, trunc, var_names),
                   Series2.from_terms({(1, 0): c, (0, 1): d}, trunc, var_names))

    @classmethod
    def identity(cls, trunc: int, var_names=("x", "y")) -> "MapGerm":
        return cls.linear(((1, 0), (0, 1)), trunc, var_names)

    def is_linear(self) -> bool:
        for s in (self.comp1, self.comp2):
            for d, *_ in s._nonzero():
                if d != 1:
                    return False
        return True

    def linear_germ(self) -> "MapGerm":
        return MapGerm.linear(self._linear, self.trunc, self.var_names)

    def nonlinear_part(self) -> "MapGerm":
        # not a germ in general (has no linear part), kept as a pair of series
        lin = self.linear_germ()
        return (self.comp1 - lin.comp1, self.comp2 - lin.comp2)

    def truncate(self, N: int) -> "MapGerm":
        return MapGerm(self.comp1.truncate(N), self.comp2.truncate(N))

    def as_polynomial(self, N: int) -> "MapGerm":
        return MapGerm(self.comp1.as_polynomial(N), self.comp2.as_polynomial(N))

    def components(self) -> tuple:
        return self.comp1, self.comp2

    def __eq__(self, other):
        if not isinstance(other, MapGerm):
            return NotImplemented
        return self.comp1 == other.comp1 and self.comp2 == other.comp2

    def __hash__(self):
        return hash((self.comp1, self.comp2))

    def __matmul__(self, other: "MapGerm") -> "MapGerm":
        return map_compose(self, other)

    def power_table(self, N: int | None = None) -> dict:
        """Cached products comp1^i * comp2^j for i + j <= N."""
        N = self.trunc if N is None else N
        if N not in self._tables:
            self._tables[N] = power_table(self, N)
        return self._tables[N]

    def to_json(self) -> dict:
        return {"comp1": self.comp1.to_json(), "comp2": self.comp2.to_json()}

    def __repr__(self):
        return f"MapGerm({self.comp1!r}, {self.comp2!r})"


def _det(m) -> GaussRational:
    (a, b), (c, d) = m
    return a * d - b * c


def compose(f: Series2, m: MapGerm) -> Series2:
    """f(m.comp1, m.comp2), truncated at min(f.trunc, m.trunc)."""
    N = min(f.trunc, m.trunc)
    if f.var_names != m.var_names:
        raise ValueError(f"incompatible variables {f.var_names} vs {m.var_names}")
    f = f.truncate(N)
    if m.is_linear():
        return substitute_linear(f, m.linear_part)
    X, Y = m.comp1.truncate(N), m.comp2.truncate(N)
    terms = f._nonzero()
    if not terms:
        return Series2.zero(N, f.var_names)
    max_i = max(t[1] for t in terms)
    max_j = max(t[2] for t in terms)
    ypow = [Series2.constant(1, N, f.var_names)]
    for _ in range(max_j):
        ypow.append(ypow[-1] * Y)
    # g_i(Y) = sum_j c_ij Y^j, then Horner in X
    rows = [Series2.zero(N, f.var_names) for _ in range(max_i + 1)]
    for d, i, j, re, im in terms:
        rows[i] = rows[i] + ypow[j].scale(GaussRational._raw(re, im))
    acc = rows[max_i]
    for i in range(max_i - 1, -1, -1):
        acc = acc * X + rows[i]
    return acc


def power_table(m: MapGerm, N: int) -> dict:
    """All products comp1^i comp2^j with i + j <= N, truncated at N."""
    N = min(N, m.trunc)
    X, Y = m.comp1.truncate(N), m.comp2.truncate(N)
    table = {(0, 0): Series2.constant(1, N, m.var_names)}
    for j in range(1, N + 1):
        table[(0, j)] = table[(0, j - 1)] * Y
    for i in range(1, N + 1):
        for j in range(0, N - i + 1):
            table[(i, j)] = table[(i - 1, j)] * X
    return table


def compose_with_table(f: Series2, table: dict, N: int) -> Series2:
    """f(m) using a precomputed ``power_table`` of m (no series products)."""
    f = f.truncate(min(f.trunc, N))
    out = Series2.zero(N, f.var_names)
    ore, oim = out._re, out._im
    n = _size(N)
    for d, i, j, cr, ci in f._nonzero():
        p = table[(i, j)]
        pre, pim = p._re, p._im
        for k in range(n):
            br, bi = pre[k], pim[k]
            if br or bi:
                ore[k] += cr * br - ci * bi
                oim[k] += cr * bi + ci * br
    return out


def map_compose(m: MapGerm, n: MapGerm) -> MapGerm:
    """(m o n)(p) = m(n(p))."""
    return MapGerm(compose(m.comp1, n), compose(m.comp2, n))


def _inverse_matrix(mat):
    det = _det(mat)
    if not det:
        raise ValueError("singular linear part: map germ is not invertible")
    (a, b), (c, d) = mat
    return ((d / det, -b / det), (-c / det, a / det))


def implicit_solve(rhs: Callable[[MapGerm, int], MapGerm], linear_part: MapGerm,
                   N: int) -> MapGerm:
    """Graded fixed point of ``candidate = rhs(candidate, trunc)``.

    ``rhs`` must gain one degree of accuracy per application: if the input
    agrees with the solution through degree k, the output agrees through
    degree k + 1.  The iteration runs at increasing working truncation,
    starting from ``linear_part``, and finishes with one verification pass at
    full truncation that must change nothing.
    """
    names = linear_part.var_names
    cand = linear_part.as_polynomial(N).truncate(1) if N >= 1 else linear_part
    iterations = 0
    for t in range(2, N + 1):
        cand = rhs(cand.as_polynomial(t), t)
        iterations += 1
    cand = cand.as_polynomial(N)
    again = rhs(cand, N)
    if again != cand:
        raise ConsistencyError("implicit solve did not stabilize", again.comp1.first_nonzero_degree_of_difference(cand.comp1))
    if iterations > N:
        raise ConsistencyError("implicit solve exceeded its iteration budget", N)
    assert cand.var_names == names
    return cand


def map_inverse(m: MapGerm) -> MapGerm:
    """Compositional inverse, built degree by degree."""
    N = m.trunc
    Linv = _inverse_matrix(m.linear_part)
    h1, h2 = m.nonlinear_part()
    names = m.var_names
    ident = MapGerm.identity(N, names)

    def step(cand: MapGerm, t: int) -> MapGerm:
        # m o n = id  <=>  n = L^{-1} (id - H o n)
        e1 = ident.comp1.truncate(t) - compose(h1.truncate(t), cand)
        e2 = ident.comp2.truncate(t) - compose(h2.truncate(t), cand)
        return MapGerm(e1.scale(Linv[0][0]) + e2.scale(Linv[0][1]),
                       e1.scale(Linv[1][0]) + e2.scale(Linv[1][1]))

    return implicit_solve(step, MapGerm.linear(Linv, N, names), N)


def divided_difference(f: Series2, A: Series2, B: Series2, slot: int = 0,
                       check: bool = True) -> Series2:
    """Delta with f(A, t) - f(B, t) = (A - B) * Delta, for the variable in
    ``slot`` replaced by the series A and B (the other variable is kept).

    Built from a^k - b^k = (a - b) * sum a^l b^(k-1-l); no series division.
    With ``check`` the identity is verified by re-multiplication.
    """
    N = min(f.trunc, A.trunc, B.trunc)
    names = f.var_names
    terms = f._nonzero()
    out = Series2.zero(N, names)
    if not terms:
        return out
    top = max(t[1 + slot] for t in terms)
    A, B = A.truncate(N), B.truncate(N)
    one = Series2.constant(1, N, names)
    bpow = [one]
    for _ in range(top):
        bpow.append(bpow[-1] * B)
    h = [None, one]  # h[k] = sum_{l<k} A^l B^(k-1-l)
    for k in range(2, top + 1):
        h.append(h[-1] * A + bpow[k - 1])
    # group the other variable: sum_k h_k * (sum_e c * t^e)
    rows = {}
    for d, i, j, re, im in terms:
        k, e = (i, j) if slot == 0 else (j, i)
        if k == 0:
            continue
        rows.setdefault(k, {})[(0, e) if slot == 0 else (e, 0)] = GaussRational._raw(re, im)
    for k, coeffs in rows.items():
        out = out + h[k] * Series2.from_terms(coeffs, N, names)
    if check:
        other = Series2.variable(1 - slot, N, names)
        gA = MapGerm(A, other) if slot == 0 else MapGerm(other, A)
        gB = MapGerm(B, other) if slot == 0 else MapGerm(other, B)
        lhs = compose(f.truncate(N), gA) - compose(f.truncate(N), gB)
        if lhs != (A - B) * out:
            raise ConsistencyError("divided difference failed re-multiplication check",
                                   (lhs - (A - B) * out).lowest_degree())
    return out


def divide_by_linear(f: Series2, alpha, beta) -> Series2:
    """Exact quotient of f by (alpha * x + beta * y), alpha != 0.

    Each homogeneous slice is divided by synthetic division from the top
    x-power down; a nonzero remainder raises ``ConsistencyError``.
    """
    alpha, beta = GaussRational.coerce(alpha), GaussRational.coerce(beta)
    if not alpha:
        raise ValueError("divide_by_linear needs a nonzero x-coefficient")
    N = max(f.trunc - 1, 0)
    out = Series2.zero(N, f.var_names)
    for d in range(1, f.trunc + 1):
        a = [f.coeff(i, d - i) for i in range(d + 1)]
        if not any(a):
            continue
        q = [ZERO] * d      # q[i] multiplies x^i y^(d-1-i)
        q[d - 1] = a[d] / alpha
        for i in range(d - 1, 0, -1):
            q[i - 1] = (a[i] - beta * q[i]) / alpha
        if beta * q[0] != a[0]:
            raise ConsistencyError("nonzero remainder in division by a linear form", d)
        for i, c in enumerate(q):
            if c:
                k = _idx(i, d - 1 - i)
                out._re[k] = c.re
                out._im[k] = c.im
    if f.coeff(0, 0):
        raise ConsistencyError("nonzero constant term in division by a linear form", 0)
    return out
