"""The linearized equation and the divergence certificate.

With sigma* = (x, 4x + y) the linearized conjugacy equation is the
difference equation u(x, 4x + y) - u(x, y) = -G1.  Writing it as
(e^{4xD} - 1) u = -G1 with D = d/dy, the Bernoulli operator

    K = sum_k 4^k beta_k x^k D^k,    E(t) = t / (e^t - 1) = sum beta_k t^k,

satisfies K (e^{4xD} - 1) = 4xD, so 4x u_y = K(-G1).  For a surface the part
of -G1 linear in r is the series A below; the certificate tracks the growth
of the x^n coefficients c_n of x (KA)(x, 0) for the generator family r*.

The generating function of those coefficients is built from E~(x) = E(4x):

    G_{a,b}(x) = 2b x E~ e^{ax} - 2x E~' e^{ax}
                 + a^2 x^2 E~ e^{-bx} + 2a x^2 E~' e^{-bx} + x^2 E~'' e^{-bx}

and S = G_{5,-3} - G_{1,-3} + G_{3,-1} - G_{-1,-1}.
"""

from __future__ import annotations

import csv
import io
import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial

from gmpy2 import mpq

from .errors import ConsistencyError
from .exactnum import (ONE, ZERO, GaussRational, bernoulli_coeffs, i_power, rational_log,
                       rational_to_json, root_value, to_rational)
from .fps import MapGerm, Series2, substitute_linear
from .involutions import XY, linear_part_Lq
from .surface import ZW, Surface, generator_e, r_star

SIGMA_SHIFT = ((1, 0), (4, 1))
SIGNED_PAIRS = ((5, -3, 1), (1, -3, -1), (3, -1, 1), (-1, -1, -1))

_H = mpq(1, 2)
# arguments of r_zbar in the four-term formula for 2x A
_FOUR_TERMS = (
    (False, ((5 * _H, _H), (-3 * _H, -_H)), 1),
    (False, ((_H, _H), (-3 * _H, -_H)), -1),
    (True, ((-3 * _H, -_H), (_H, _H)), 1),
    (True, ((_H, -_H), (_H, _H)), -1),
)


# -- the operator K -----------------------------------------------------------

def K_apply(a: Series2, N: int | None = None) -> Series2:
    """sum_k 4^k beta_k x^k d^k/dy^k applied to ``a``; degree-preserving."""
    N = a.trunc if N is None else min(N, a.trunc)
    table = bernoulli_coeffs(N)
    out = Series2.zero(N, a.var_names)
    weights = [mpq(4) ** k * table[k] for k in range(N + 1)]
    for d, i, j, re, im in a._nonzero():
        if d > N:
            continue
        falling = 1
        for k in range(j + 1):
            w = weights[k]
            if w:
                c = w * falling
                idx = d * (d + 1) // 2 + i + k
                out._re[idx] += re * c
                out._im[idx] += im * c
            falling *= j - k
    return out


def shift_operator(f: Series2) -> Series2:
    """(e^{4xD} - 1) f = f(x, 4x + y) - f(x, y)."""
    return substitute_linear(f, SIGMA_SHIFT) - f


def integrate_y(f: Series2) -> Series2:
    """Antiderivative in y with zero x-only part; raises the truncation by one."""
    out = Series2.zero(f.trunc + 1, f.var_names)
    for d, i, j, re, im in f._nonzero():
        idx = (d + 1) * (d + 2) // 2 + i
        out._re[idx] = re / (j + 1)
        out._im[idx] = im / (j + 1)
    return out


# -- the difference equation --------------------------------------------------

def solve_difference_direct(G1: Series2, N: int | None = None) -> Series2:
    """u with u(x, 4x + y) - u(x, y) = -G1, the x^k coefficient of each u_k
    set to zero.  Each degree is an upper-triangular system solved from the
    top y-power down."""
    N = G1.trunc if N is None else min(N, G1.trunc)
    at_x0 = G1.truncate(N).restrict_x0()
    if any(at_x0):
        raise ConsistencyError("x does not divide G1", next(j for j, c in enumerate(at_x0) if c))
    rhs_series = -G1.truncate(N)
    u = Series2.zero(N, G1.var_names)
    for k in range(1, N + 1):
        # unknowns u_j := coeff of x^(k-j) y^j, j = 1..k; row l (y^l), l < k:
        #   sum_{j > l} C(j, l) 4^(j-l) u_j = rhs[x^(k-l) y^l]
        sol = {}
        for l in range(k - 1, -1, -1):
            acc = rhs_series.coeff(k - l, l)
            for j in range(l + 2, k + 1):
                if sol[j]:
                    acc = acc - sol[j] * (comb(j, l) * 4 ** (j - l))
            sol[l + 1] = acc / (4 * (l + 1))
        for j, c in sol.items():
            if c:
                idx = k * (k + 1) // 2 + (k - j)
                u._re[idx] = c.re
                u._im[idx] = c.im
    if shift_operator(u) != rhs_series:
        raise ConsistencyError("difference solve failed its substitution check", N)
    return u


def solve_difference_K(G1: Series2, N: int | None = None) -> Series2:
    """The same u from u_y = K(a) / 4 with G1 = -x a, integrated in y."""
    N = G1.trunc if N is None else min(N, G1.trunc)
    a = -G1.truncate(N).divide_by_x()
    return integrate_y(K_apply(a).scale(mpq(1, 4)))


# -- the series A ---------------------------------------------------------------

def A_from_Lq(s: Surface, N: int) -> Series2:
    """conj(Lq)((x - y)/2, (x + y)/2) - Lq((x + y)/2, -(3x + y)/2)."""
    Lq = linear_part_Lq(s, N)
    first = substitute_linear(Lq.conj(), ((_H, -_H), (_H, _H)), XY)
    second = substitute_linear(Lq, ((_H, _H), (-3 * _H, -_H)), XY)
    return first - second


def A_four_terms(s: Surface, N: int) -> Series2:
    """2x A as four evaluations of r_zbar and its conjugate, divided by 2x."""
    rzb = s.r_zbar(N + 1)
    total = Series2.zero(N + 1, XY)
    for conj, matrix, sign in _FOUR_TERMS:
        term = substitute_linear(rzb.conj() if conj else rzb, matrix, XY)
        total = total + term if sign > 0 else total - term
    return total.divide_by_x().scale(_H)


def A_series(s: Surface, N: int) -> Series2:
    """A to degree N by both routes; they must agree exactly."""
    by_lq = A_from_Lq(s, N)
    by_terms = A_four_terms(s, N)
    if by_lq != by_terms:
        raise ConsistencyError("A: Lq route and four-term route disagree",
                               (by_lq - by_terms).lowest_degree())
    return by_lq


def direct_coefficients(s: Surface, N: int) -> list:
    """[x^n] x (KA)(x, 0) for n = 0..N, computed from A by applying K."""
    if N < 1:
        return [ZERO] * (N + 1)
    A = A_series(s, N - 1)
    KA = K_apply(A)
    return [ZERO] + list(KA.restrict_y0())


# -- closed forms -------------------------------------------------------------

def _poly_mul(p: list, q: list, n: int) -> list:
    out = [mpq(0)] * n
    for i, a in enumerate(p[:n]):
        if a:
            for j in range(min(len(q), n - i)):
                if q[j]:
                    out[i + j] += a * q[j]
    return out


def _exp_series(a: int, n: int) -> list:
    out = [mpq(1)]
    for m in range(1, n):
        out.append(out[-1] * a / m)
    return out


def _deriv(p: list) -> list:
    return [p[k] * k for k in range(1, len(p))] + [mpq(0)]


def E_tilde(N: int) -> list:
    """Coefficients of E(4x) through x^N."""
    table = bernoulli_coeffs(N + 2)
    return [table[k] * 4 ** k for k in range(N + 3)]


def S_ab_closed_form(a: int, b: int, N: int) -> list:
    """Coefficients x^0..x^N of G_{a,b} (see the module docstring)."""
    n = N + 1
    E0 = E_tilde(N)
    E1 = _deriv(E0)
    E2 = _deriv(E1)
    ea, eb = _exp_series(a, n), _exp_series(-b, n)
    x1 = [mpq(0), mpq(1)]
    x2 = [mpq(0), mpq(0), mpq(1)]
    pieces = ((2 * b, x1, E0, ea), (-2, x1, E1, ea),
              (a * a, x2, E0, eb), (2 * a, x2, E1, eb), (1, x2, E2, eb))
    out = [mpq(0)] * n
    for c, mono, E, ex in pieces:
        prod = _poly_mul(_poly_mul(mono, E, n), ex, n)
        for k in range(n):
            out[k] += c * prod[k]
    return out


def S_series(N: int) -> list:
    """Coefficients S_0..S_N of S = G_{5,-3} - G_{1,-3} + G_{3,-1} - G_{-1,-1}."""
    out = [mpq(0)] * (N + 1)
    for a, b, sign in SIGNED_PAIRS:
        for k, c in enumerate(S_ab_closed_form(a, b, N)):
            out[k] += sign * c
    return out


def _falling(n: int, j: int) -> int:
    """n! / (n - j)!"""
    return factorial(n) // factorial(n - j)


def gamma_five_sum(a: int, b: int, n: int) -> mpq:
    """gamma_{n+1} / eps^(n+2) by direct summation of the five explicit sums."""
    beta = bernoulli_coeffs(n + 1)
    a, b = mpq(a), mpq(b)
    w = [mpq(4) ** j * beta[j] for j in range(n + 2)]
    sgn = -1 if (n - 1) % 2 else 1
    t1 = 2 * sum(w[j] * _falling(n, j) * a ** (n - j) * b for j in range(0, n + 1))
    t2 = -2 * sum(w[j] * j * _falling(n, j - 1) * a ** (n - j + 1) for j in range(1, n + 2))
    t3 = sgn * n * sum(w[j] * _falling(n - 1, j) * (-1) ** j * b ** (n - 1 - j) * a * a
                       for j in range(0, n))
    t4 = sgn * n * sum(w[j] * 2 * j * _falling(n - 1, j - 1) * (-1) ** (j - 1) * b ** (n - j) * a
                       for j in range(1, n + 1))
    t5 = sgn * n * sum(w[j] * 2 * comb(j, 2) * _falling(n - 1, j - 2) * (-1) ** (j - 2)
                       * b ** (n + 1 - j) for j in range(2, n + 2))
    return t1 + t2 + t3 + t4 + t5


def P_zbar(n: int, eps=1, trunc: int | None = None) -> Series2:
    """d/dzbar of eps^(n+2) (z^n zbar^2 + (-1)^(n-1) zbar^n z^2)."""
    eps = to_rational(eps)
    c = eps ** (n + 2)
    trunc = n + 1 if trunc is None else trunc
    terms = {(n, 1): 2 * c}
    terms[(2, n - 1)] = terms.get((2, n - 1), 0) + (-1) ** (n - 1) * n * c
    return Series2.from_terms(terms, trunc, ZW)


def gamma_direct(a: int, b: int, n: int, eps=1) -> GaussRational:
    """gamma_{n+1}: K applied to P_{n+2,zbar}(ax + y, bx - y), read at x^(n+1), y = 0."""
    p = substitute_linear(P_zbar(n, eps), ((a, 1), (b, -1)), XY)
    return K_apply(p).coeff(n + 1, 0)


def closed_coefficients(N: int, eps, S: list | None = None) -> list:
    """c_n = i^(n-2) (n-1)! eps^(n+1) S_n / 2^(n+1), n = 0..N (c_0 = c_1 = 0)."""
    eps = to_rational(eps)
    S = S_series(N) if S is None else S
    out = [ZERO, ZERO]
    for n in range(2, N + 1):
        scale = mpq(factorial(n - 1)) * eps ** (n + 1) / mpq(2) ** (n + 1)
        out.append(i_power(n - 2) * GaussRational(S[n] * scale))
    return out


# -- the certificate ----------------------------------------------------------

def _root(q, n: int) -> float:
    """|q|^(1/n) as a float for a rational q."""
    q = to_rational(q)
    if q == 0:
        return 0.0
    return math.exp(rational_log(abs(q)) / n)


def _strictly_increasing_roots(values: list) -> bool:
    """Exact check that |c_n|^(1/n) strictly increases along ``values``,
    a list of (n, |c_n|^2)."""
    for (n1, a1), (n2, a2) in zip(values, values[1:]):
        # a1^(1/2n1) < a2^(1/2n2)  <=>  a1^n2 < a2^n1
        if not a1 ** n2 < a2 ** n1:
            return False
    return True


def fit_radius(S: list, lo: int, hi: int) -> float | None:
    """1/R from a least-squares fit log|S_n| ~ log C + p log n - n log R
    over the nonzero S_n with lo <= n <= hi (diagnostic only)."""
    pts = [(n, rational_log(abs(S[n]))) for n in range(lo, hi + 1) if S[n]]
    if len(pts) < 4:
        return None
    # normal equations for [1, log n, n]
    cols = [[1.0, math.log(n), float(n)] for n, _ in pts]
    ys = [y for _, y in pts]
    M = [[sum(c[i] * c[j] for c in cols) for j in range(3)] for i in range(3)]
    v = [sum(c[i] * y for c, y in zip(cols, ys)) for i in range(3)]
    for i in range(3):  # Gauss-Jordan on a 3x3, well conditioned enough for a report
        p = M[i][i]
        for j in range(3):
            M[i][j] /= p
        v[i] /= p
        for r in range(3):
            if r != i:
                f = M[r][i]
                for j in range(3):
                    M[r][j] -= f * M[i][j]
                v[r] -= f * v[i]
    return math.exp(v[2])


@dataclass
class DivergenceCertificate:
    trunc: int
    eps: object
    coeffs_direct: list
    coeffs_closed: list
    S: list
    growth: dict = field(default_factory=dict)            # n -> |c_n|^(1/n)
    s_roots: dict = field(default_factory=dict)           # n -> |S_n|^(1/n)
    s_radius_estimate: float = 0.0
    s_ratio_estimate: float | None = None
    s_fit_estimate: float | None = None
    window: tuple = (0, 0)
    tail: tuple = (0, 0)
    routes_agree: bool = False
    estimate_positive: bool = False
    estimate_stable: bool = False
    growth_increasing: bool = False
    difference_route_ok: bool = False

    @property
    def passed(self) -> bool:
        return (self.routes_agree and self.estimate_positive and self.estimate_stable
                and self.growth_increasing and self.difference_route_ok)

    def table(self) -> list:
        rows = []
        for n in range(2, self.trunc + 1):
            c = self.coeffs_direct[n]
            rows.append({"n": n, "c_re": rational_to_json(c.re), "c_im": rational_to_json(c.im),
                         "root": self.growth[n], "S_n": rational_to_json(self.S[n]),
                         "s_root": self.s_roots[n]})
        return rows

    def to_json(self) -> dict:
        return {"pass": self.passed, "N": self.trunc, "eps": rational_to_json(self.eps),
                "s_radius_estimate": self.s_radius_estimate,
                "s_ratio_estimate": self.s_ratio_estimate,
                "s_fit_estimate": self.s_fit_estimate,
                "window": list(self.window), "tail": list(self.tail),
                "checks": {"routes_agree": self.routes_agree,
                           "estimate_positive": self.estimate_positive,
                           "estimate_stable": self.estimate_stable,
                           "growth_increasing": self.growth_increasing,
                           "difference_route_ok": self.difference_route_ok},
                "table": self.table()}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "s_root"])
        for n in range(2, self.trunc + 1):
            w.writerow([n, repr(self.s_roots[n])])
        return buf.getvalue()


def window_estimate(S: list, lo: int, hi: int) -> tuple:
    """Mean and relative spread of |S_n|^(1/n) over nonzero S_n, lo <= n <= hi."""
    roots = [_root(S[n], n) for n in range(lo, hi + 1) if S[n]]
    if not roots:
        return 0.0, float("inf"), roots
    mean = statistics.fmean(roots)
    spread = (max(roots) - min(roots)) / mean
    return mean, spread, roots


def ratio_estimate(S: list, lo: int, hi: int) -> float | None:
    """Mean of |S_{n-2}/S_n|^(-1/2) over the window (S lives on odd n)."""
    vals = [math.exp(-0.5 * (rational_log(abs(S[n - 2])) - rational_log(abs(S[n]))))
            for n in range(max(lo, 2), hi + 1) if S[n] and S[n - 2]]
    return statistics.fmean(vals) if vals else None


def divergence_certificate(N: int, eps=1, threads: int = 1,
                           stability: float = 0.10, floor=Fraction(1, 4)) -> DivergenceCertificate:
    """Build r*, compute c_n twice, and assess growth.  Route disagreement is
    an internal error, never a failed certificate."""
    if N < 6:
        raise ValueError("the certificate needs N >= 6")
    eps = to_rational(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    surface = r_star(N + 1, eps)

    def direct_route():
        A = A_series(surface, N - 1)
        KA = K_apply(A)
        u = solve_difference_direct(-A)
        return [ZERO] + list(KA.restrict_y0()), A, KA, u

    def closed_route():
        return S_series(N)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        fut_d = pool.submit(direct_route)
        fut_c = pool.submit(closed_route)
        direct, A, KA, u = fut_d.result()
        S = fut_c.result()
        # five-sum cross-check of every S_n, independent per n
        checks = list(pool.map(lambda n: _five_sum_matches(S, n), range(2, N + 1)))
    if not all(checks):
        raise ConsistencyError("closed form disagrees with the five-sum evaluation",
                               2 + checks.index(False))
    closed = closed_coefficients(N, eps, S)
    if direct != closed:
        bad = next(n for n in range(N + 1) if direct[n] != closed[n])
        raise ConsistencyError("direct and closed-form certificate coefficients disagree", bad)
    # the K-route derivative against the difference solve: [x^m] KA(x,0) = 4 u_{m-1,1}
    KA0 = KA.restrict_y0()
    diff_ok = all(KA0[m] == u.coeff(m - 1, 1) * 4 for m in range(1, len(KA0)))
    diff_ok = diff_ok and solve_difference_K(-A) == u
    if not diff_ok:
        raise ConsistencyError("K-route and difference solve disagree", N)

    lo = (2 * N) // 3 + 1
    mean, spread, _ = window_estimate(S, lo, N)
    tail = (N // 2, N)
    tail_vals = [(n, direct[n].magnitude_sq()) for n in range(tail[0], N + 1) if direct[n]]
    cert = DivergenceCertificate(
        trunc=N, eps=eps, coeffs_direct=direct, coeffs_closed=closed, S=S,
        growth={n: root_value(direct[n].magnitude_sq(), n) for n in range(2, N + 1)},
        s_roots={n: _root(S[n], n) for n in range(2, N + 1)},
        s_radius_estimate=mean, s_ratio_estimate=ratio_estimate(S, lo, N),
        s_fit_estimate=fit_radius(S, max(5, N // 3), N),
        window=(lo, N), tail=tail)
    cert.routes_agree = True
    cert.difference_route_ok = True
    cert.estimate_positive = mean > float(floor)
    cert.estimate_stable = spread <= stability
    cert.growth_increasing = len(tail_vals) >= 2 and _strictly_increasing_roots(tail_vals)
    return cert


def _five_sum_matches(S: list, m: int) -> bool:
    """[x^m] S against the five sums with n = m - 1 (the x^{n+1} coefficient)."""
    n = m - 1
    if n < 1:
        return True
    total = sum(sign * gamma_five_sum(a, b, n) for a, b, sign in SIGNED_PAIRS)
    return total / factorial(n) == S[m]
