"""The unique normalized linearizing transformation and the solution operator.

Phi = (x + u, y + v) conjugates tau_j to its linear part when
Phi o tau_j = tau_j* o Phi for j = 1, 2.  Degree by degree the unknown
slice (u_k, v_k) enters only through the homogeneous operator

    D2F(u, v) = (u o tau1* + u, v o tau1* - v + 2u, u o tau2* + u, v o tau2* - v - 2u)

and everything else at degree k is fixed by lower degrees.  Each slice is
therefore one exact linear system: the four equation blocks in the order
(tau_1 comp1, tau_1 comp2, tau_2 comp1, tau_2 comp2), followed by the
normalization rows u(0, y) = 0, u(x, 0) even, v(x, 0) odd.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .errors import ConsistencyError, ThresholdUnreachable
from .exactnum import ONE, ZERO, GaussRational, rational_to_json, root_exceeds, root_value, to_rational
from .fps import MapGerm, Series2, compose, compose_with_table, substitute_linear
from .involutions import (TAU1_STAR, TAU2_STAR, XY, InvolutionPair, linear_pair,
                          pair_from_surface)
from .linalg import nullspace, rank, solve_unique
from .surface import Surface, degree_to_index, generator_of_degree, index_to_degree, metric_d


def _monomial(i: int, j: int, N: int) -> Series2:
    return Series2.from_terms({(i, j): 1}, N, XY)


def _slice_coeffs(s: Series2, k: int) -> list:
    """Coefficients of the degree-k slice, x^0 y^k first."""
    return [s.coeff(i, k - i) for i in range(k + 1)]


@lru_cache(maxsize=None)
def d2f_matrix(k: int, with_normalization: bool = True) -> tuple:
    """Rows of the degree-k system; columns are u_k then v_k coefficients."""
    n = k + 1
    cols = []
    for which in ("u", "v"):
        for i in range(n):
            m = _monomial(i, k - i, k)
            a1 = substitute_linear(m, TAU1_STAR)
            a2 = substitute_linear(m, TAU2_STAR)
            if which == "u":
                blocks = (a1 + m, m.scale(2), a2 + m, m.scale(-2))
            else:
                zero = Series2.zero(k, XY)
                blocks = (zero, a1 - m, zero, a2 - m)
            col = []
            for b in blocks:
                col.extend(_slice_coeffs(b, k))
            cols.append(col)
    rows = [tuple(col[r] for col in cols) for r in range(4 * n)]
    if with_normalization:
        rows.extend(normalization_rows(k))
    return tuple(rows)


def normalization_rows(k: int) -> list:
    n = k + 1
    rows = []

    def unit(col):
        return tuple(ONE if c == col else ZERO for c in range(2 * n))

    rows.append(unit(0))                 # u: coefficient of y^k
    if k % 2 == 1:
        rows.append(unit(k))             # u(x, 0) even: no x^k
    else:
        rows.append(unit(n + k))         # v(x, 0) odd: no x^k
    return rows


@dataclass(frozen=True)
class TransformSlice:
    """Homogeneous degree-k part (u_k, v_k) of a transformation."""

    k: int
    u: Series2
    v: Series2

    def coefficients(self) -> list:
        return _slice_coeffs(self.u, self.k) + _slice_coeffs(self.v, self.k)

    def max_abs_sq(self):
        return max((c.magnitude_sq() for c in self.coefficients()), default=to_rational(0))

    @property
    def dtilde(self) -> float:
        """max |coeff|^(1/k): the slice metric to the origin, as a float."""
        return root_value(self.max_abs_sq(), self.k)

    def dtilde_at_least(self, t) -> bool:
        return root_exceeds(self.max_abs_sq(), self.k, t)

    def __eq__(self, other):
        if not isinstance(other, TransformSlice):
            return NotImplemented
        return self.k == other.k and self.coefficients() == other.coefficients()

    def __add__(self, other: "TransformSlice") -> "TransformSlice":
        if self.k != other.k:
            raise ValueError("slices of different degree")
        return TransformSlice(self.k, self.u + other.u, self.v + other.v)

    def is_zero(self) -> bool:
        return not any(self.coefficients())

    def to_json(self) -> dict:
        return {"k": self.k, "u": self.u.to_json(), "v": self.v.to_json(),
                "dtilde": self.dtilde, "max_abs_sq": rational_to_json(self.max_abs_sq())}


@dataclass
class NormalizedTransform:
    u: Series2
    v: Series2
    trunc: int
    residual_degree: int
    ranks: dict = field(default_factory=dict)

    def phi(self) -> MapGerm:
        x = Series2.variable(0, self.trunc, XY)
        y = Series2.variable(1, self.trunc, XY)
        return MapGerm(x + self.u, y + self.v)

    def slice(self, k: int) -> TransformSlice:
        return TransformSlice(k, self.u.homogeneous(k).truncate(k), self.v.homogeneous(k).truncate(k))

    def normalization_ok(self) -> bool:
        return normalization_holds(self.u, self.v)

    def degree_stats(self) -> list:
        out = []
        for k in range(2, self.trunc + 1):
            sl = self.slice(k)
            out.append({"k": k, "dtilde": sl.dtilde, "max_abs_sq": rational_to_json(sl.max_abs_sq())})
        return out

    def to_json(self) -> dict:
        return {"trunc": self.trunc, "residual_degree": self.residual_degree,
                "u": self.u.to_json(), "v": self.v.to_json(),
                "normalized": self.normalization_ok(), "degrees": self.degree_stats()}


def normalization_holds(u: Series2, v: Series2) -> bool:
    """u(0, y) = 0, u(x, 0) = u(-x, 0), v(x, 0) = -v(-x, 0), exactly."""
    if any(u.restrict_x0()):
        return False
    for i, c in enumerate(u.restrict_y0()):
        if i % 2 == 1 and c:
            return False
    for i, c in enumerate(v.restrict_y0()):
        if i % 2 == 0 and c:
            return False
    return True


def conjugacy_defects(pair: InvolutionPair, u: Series2, v: Series2, N: int) -> list:
    """The four components of Phi o tau_j - tau_j* o Phi, j = 1, 2."""
    x = Series2.variable(0, N, XY)
    y = Series2.variable(1, N, XY)
    out = []
    for tau, star in ((pair.tau1, TAU1_STAR), (pair.tau2, TAU2_STAR)):
        tau = tau.truncate(N)
        P1, P2 = x + u, y + v
        left1 = tau.comp1 + compose(u, tau)
        left2 = tau.comp2 + compose(v, tau)
        (a, b), (c, d) = star
        out.append(left1 - (P1.scale(a) + P2.scale(b)))
        out.append(left2 - (P1.scale(c) + P2.scale(d)))
    return out


def residual_degree(pair: InvolutionPair, u: Series2, v: Series2, N: int) -> int:
    lows = [d.lowest_degree() for d in conjugacy_defects(pair, u, v, N)]
    lows = [l for l in lows if l is not None]
    return min(lows) if lows else N + 1


def normalize_pair(pair: InvolutionPair, N: int | None = None) -> NormalizedTransform:
    """Solve for the unique normalized Phi with Phi tau_j Phi^-1 = tau_j*."""
    N = pair.trunc if N is None else N
    if N > pair.trunc:
        raise ValueError("requested degree exceeds the involutions' truncation")
    taus = [pair.tau1.truncate(N), pair.tau2.truncate(N)]
    tables = [t.power_table(N) for t in taus]
    u = Series2.zero(N, XY)
    v = Series2.zero(N, XY)
    ranks = {}
    for k in range(2, N + 1):
        rhs = []
        for tau, table, star in zip(taus, tables, (TAU1_STAR, TAU2_STAR)):
            (a, b), (c, d) = star
            uo = compose_with_table(u, table, N)
            vo = compose_with_table(v, table, N)
            # Phi o tau - tau* o Phi with the degree-k slice still zero
            e1 = tau.comp1 + uo - (u.scale(a) + v.scale(b))
            e2 = tau.comp2 + vo - (u.scale(c) + v.scale(d))
            # tau.comp_i carries the linear part of tau*, which cancels here
            lin1 = Series2.from_terms({(1, 0): a, (0, 1): b}, N, XY)
            lin2 = Series2.from_terms({(1, 0): c, (0, 1): d}, N, XY)
            e1 = e1 - lin1
            e2 = e2 - lin2
            rhs.extend(-c_ for c_ in _slice_coeffs(e1, k))
            rhs.extend(-c_ for c_ in _slice_coeffs(e2, k))
        matrix = d2f_matrix(k)
        rhs.extend([ZERO] * (len(matrix) - len(rhs)))
        sol = solve_unique(matrix, rhs, degree=k)
        ranks[k] = len(sol)  # full column rank, checked by solve_unique
        n = k + 1
        u = u + Series2.from_terms({(i, k - i): sol[i] for i in range(n)}, N, XY)
        v = v + Series2.from_terms({(i, k - i): sol[n + i] for i in range(n)}, N, XY)
    res = residual_degree(pair, u, v, N)
    if res <= N:
        raise ConsistencyError("normalized transform fails conjugacy", res)
    if not normalization_holds(u, v):
        raise ConsistencyError("normalized transform violates normalization", N)
    return NormalizedTransform(u, v, N, res, ranks)


def normalize_surface(s: Surface, N: int) -> NormalizedTransform:
    return normalize_pair(pair_from_surface(s, N), N)


def degree_slice(s: Surface, k: int) -> TransformSlice:
    """pi_k P(s): the degree-k slice of the normalized transform of s."""
    if k < 2:
        raise ValueError("transform slices start at degree 2")
    return normalize_surface(s, k).slice(k)


def homogeneous_L(r_k: Surface, N: int | None = None) -> TransformSlice:
    """L on one homogeneous slice: the matching degree of the full solver's
    output for that slice alone (slice index k = total degree - 2)."""
    degs = r_k.degrees()
    if len(degs) > 1:
        raise ValueError("homogeneous_L needs a homogeneous surface slice")
    if not degs:
        k = 2 if N is None else N
        zero = Series2.zero(k, XY)
        return TransformSlice(k, zero, zero)
    k = degree_to_index(degs[0])
    N = k if N is None else N
    if N < k:
        raise ValueError("truncation below the slice degree")
    return normalize_surface(r_k, N).slice(k)


def kernel_of_d2f(k: int) -> list:
    """Kernel basis of the unnormalized degree-k operator, as (u_k, v_k) slices."""
    basis = nullspace(d2f_matrix(k, with_normalization=False))
    n = k + 1
    out = []
    for vec in basis:
        u = Series2.from_terms({(i, k - i): vec[i] for i in range(n)}, k, XY)
        v = Series2.from_terms({(i, k - i): vec[n + i] for i in range(n)}, k, XY)
        out.append(TransformSlice(k, u, v))
    return out


def system_rank(k: int, with_normalization: bool = True) -> int:
    return rank(d2f_matrix(k, with_normalization))


# -- triangularity of the solution operator ------------------------------------

@dataclass
class TriangularityReport:
    trunc: int
    truncation_violations: list = field(default_factory=list)   # (k, m)
    decomposition_violations: list = field(default_factory=list)  # k

    @property
    def ok(self) -> bool:
        return not self.truncation_violations and not self.decomposition_violations

    def to_json(self) -> dict:
        return {"trunc": self.trunc, "ok": self.ok,
                "truncation_violations": [list(p) for p in self.truncation_violations],
                "decomposition_violations": list(self.decomposition_violations)}


def triangularity_check(s: Surface, N: int) -> TriangularityReport:
    """Check that degree k of P(s) depends only on slices of index <= k, and
    that P(s)_k - L(s_k) depends only on slices of index <= k - 1."""
    report = TriangularityReport(N)
    full = normalize_surface(s, N)
    for m in range(2, N + 1):
        part = normalize_surface(s.truncated_index(m), m)
        for k in range(2, m + 1):
            if part.slice(k) != full.slice(k):
                report.truncation_violations.append((k, m))
    for k in range(2, N + 1):
        lower = normalize_surface(s.truncated_index(k - 1), k).slice(k)
        L = homogeneous_L(s.slice_index(k), k) if s.slice_index(k).coeffs else None
        expected = lower if L is None else lower + L
        if full.slice(k) != expected:
            report.decomposition_violations.append(k)
    return report


# -- greedy perturbation toward large transform coefficients ------------------

@dataclass
class PerturbStep:
    degree: int
    rank: int
    threshold: Fraction
    perturbed: bool
    dtilde: float
    max_abs_sq: object

    def to_json(self) -> dict:
        return {"degree": self.degree, "rank": self.rank,
                "threshold": [str(self.threshold.numerator), str(self.threshold.denominator)],
                "perturbed": self.perturbed, "dtilde": self.dtilde,
                "max_abs_sq": rational_to_json(self.max_abs_sq)}


@dataclass
class PerturbResult:
    surface: Surface
    steps: list

    def to_json(self) -> dict:
        return {"surface": self.surface.to_json(), "steps": [s.to_json() for s in self.steps]}


def perturb_to_large_coeffs(base: Surface, degrees, eps) -> PerturbResult:
    """Greedy choice at each listed total degree n_k (k = 1, 2, ...): keep the
    slice of ``base`` if the transform slice of matching degree already has
    max |coeff|^(1/d) >= k/2, otherwise add the generator of that degree.

    When the unperturbed slice passes, it is kept even if the perturbed one
    would pass as well.
    """
    eps = to_rational(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    degrees = list(degrees)
    if degrees != sorted(set(degrees)):
        raise ValueError("degrees must be strictly ascending")
    top = max(degrees, default=base.trunc)
    current = base.with_trunc(max(base.trunc, top))
    steps = []
    for rank_k, n in enumerate(degrees, start=1):
        if n < 5:
            raise ValueError("perturbation degrees start at 5 (the degree-4 generator vanishes)")
        threshold = Fraction(rank_k, 2)
        kk = degree_to_index(n)
        sl = degree_slice(current.truncated(n), kk)
        perturbed = False
        if not sl.dtilde_at_least(threshold):
            candidate = current + generator_of_degree(n, eps, current.trunc)
            sl = degree_slice(candidate.truncated(n), kk)
            if not sl.dtilde_at_least(threshold):
                raise ThresholdUnreachable(
                    n, rank_k,
                    f"neither choice reaches max|coeff|^(1/{kk}) >= {threshold}; "
                    f"best is {sl.dtilde:.6g}")
            current = candidate
            perturbed = True
        steps.append(PerturbStep(n, rank_k, threshold, perturbed, sl.dtilde, sl.max_abs_sq()))
    current = Surface(current.trunc, current.coeffs, base.epsilon)
    if not metric_d(base, current).at_most(eps):
        raise ConsistencyError("perturbation left the eps-ball around the base surface")
    return PerturbResult(current, steps)
