"""The pair of involutions of the complexified surface.

On the complexification, with (z, w) as coordinates (w standing for zbar),
tau_1 fixes w and the function 2 z w + z^2 + r_zbar(z, w), while tau_2 fixes
z and 2 z w + w^2 + r_z(z, w).  Solving for the moving coordinate gives

    tau_1:  z' = -z - 2w - [r_zbar(z', w) - r_zbar(z, w)] / (z' - z),  w' = w

where the quotient is a divided difference (never a series division).  In
x = z + w, y = z - w the linear parts become (-x, -2x + y) and (-x, 2x + y),
and rho(x, y) = (conj x, -conj y) intertwines the two involutions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ConsistencyError
from .exactnum import GaussRational
from .fps import (MapGerm, Series2, compose, conj_twist, divide_by_linear, divided_difference,
                  implicit_solve, map_compose, substitute_linear)
from .surface import ZW, Surface

XY = ("x", "y")
HALF = GaussRational(1, 0) / 2

TAU1_STAR = ((-1, 0), (-2, 1))
TAU2_STAR = ((-1, 0), (2, 1))
SIGMA_STAR = ((1, 0), (4, 1))

# (z, w) -> (x, y) = (z + w, z - w) and back
_TO_XY = ((1, 1), (1, -1))
_FROM_XY = ((HALF, HALF), (HALF, -HALF))


def tau_star(j: int, trunc: int) -> MapGerm:
    return MapGerm.linear(TAU1_STAR if j == 1 else TAU2_STAR, trunc, XY)


def sigma_star(trunc: int) -> MapGerm:
    return MapGerm.linear(SIGMA_STAR, trunc, XY)


def _coerce_matrix(m):
    return tuple(tuple(GaussRational.coerce(v) for v in row) for row in m)


def tau1_from_surface(s: Surface, N: int) -> MapGerm:
    """tau_1 in (z, w) coordinates, to total degree N."""
    # degree t of z' needs r_zbar through degree t + 1
    rzb = s.r_zbar(N + 1)
    z = Series2.variable(0, N, ZW)
    w = Series2.variable(1, N, ZW)
    base = -z - w.scale(2)

    def step(cand: MapGerm, t: int) -> MapGerm:
        q = divided_difference(rzb.truncate(t + 1), cand.comp1, z.truncate(t), slot=0, check=False)
        return MapGerm(base.truncate(t) - q, w.truncate(t))

    tau = implicit_solve(step, MapGerm(base, w), N)
    # the divided-difference form with re-multiplication, once at full order
    divided_difference(rzb, tau.comp1, z, slot=0, check=True)
    _check_invariant(tau.comp1, s, N, slot=0)
    return tau


def tau2_direct_from_surface(s: Surface, N: int) -> MapGerm:
    """tau_2 in (z, w) solved from its own implicit equation (w moves)."""
    rz = s.r_z(N + 1)
    z = Series2.variable(0, N, ZW)
    w = Series2.variable(1, N, ZW)
    base = -w - z.scale(2)

    def step(cand: MapGerm, t: int) -> MapGerm:
        q = divided_difference(rz.truncate(t + 1), cand.comp2, w.truncate(t), slot=1, check=False)
        return MapGerm(z.truncate(t), base.truncate(t) - q)

    tau = implicit_solve(step, MapGerm(z, base), N)
    _check_invariant(tau.comp2, s, N, slot=1)
    return tau


def _check_invariant(moved: Series2, s: Surface, N: int, slot: int):
    """Substitute back: the projected function must be unchanged through
    degree N + 1, which pins ``moved`` through degree N."""
    T = N + 1
    z = Series2.variable(0, T, ZW)
    w = Series2.variable(1, T, ZW)
    mv = moved.as_polynomial(T)
    if slot == 0:
        fn = s.r_zbar(T)
        before = (z * w).scale(2) + z * z + fn
        after = (mv * w).scale(2) + mv * mv + compose(fn, MapGerm(mv, w))
    else:
        fn = s.r_z(T)
        before = (z * w).scale(2) + w * w + fn
        after = (z * mv).scale(2) + mv * mv + compose(fn, MapGerm(z, mv))
    if before != after:
        raise ConsistencyError("involution does not preserve its projection",
                               (before - after).lowest_degree())


def to_xy(m: MapGerm) -> MapGerm:
    """Conjugate a (z, w) germ by x = z + w, y = z - w."""
    c1 = m.comp1 + m.comp2
    c2 = m.comp1 - m.comp2
    return MapGerm(substitute_linear(c1, _FROM_XY, XY), substitute_linear(c2, _FROM_XY, XY))


def from_xy(m: MapGerm) -> MapGerm:
    """Inverse coordinate change: an (x, y) germ back to (z, w)."""
    half = HALF
    c1 = (m.comp1 + m.comp2).scale(half)
    c2 = (m.comp1 - m.comp2).scale(half)
    return MapGerm(substitute_linear(c1, _TO_XY, ZW), substitute_linear(c2, _TO_XY, ZW))


def rho_conjugate(m: MapGerm) -> MapGerm:
    """rho o m o rho for rho(x, y) = (conj x, -conj y)."""
    return MapGerm(conj_twist(m.comp1, (1, -1)), -conj_twist(m.comp2, (1, -1)))


def tau2_from_tau1(t1: MapGerm) -> MapGerm:
    """tau_2 = rho tau_1 rho, with t1 in (x, y) coordinates."""
    return rho_conjugate(t1)


def nonlinear_parts(m: MapGerm, linear) -> tuple:
    lin = MapGerm.linear(linear, m.trunc, m.var_names)
    return m.comp1 - lin.comp1, m.comp2 - lin.comp2


@dataclass
class Certification:
    involutive: bool = False
    linear_parts: bool = False
    fixed_locus: bool = False
    reality: bool = False
    f_equals_g: bool = False
    tau2_direct: bool | None = None
    details: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        flags = [self.involutive, self.linear_parts, self.fixed_locus, self.reality]
        flags.append(self.f_equals_g)
        if self.tau2_direct is not None:
            flags.append(self.tau2_direct)
        return all(flags)

    def to_json(self) -> dict:
        return {"involutive": self.involutive, "linear_parts": self.linear_parts,
                "fixed_locus": self.fixed_locus, "reality": self.reality,
                "f_equals_g": self.f_equals_g, "tau2_direct": self.tau2_direct,
                "ok": self.ok, "details": list(self.details)}


@dataclass
class InvolutionPair:
    tau1: MapGerm
    tau2: MapGerm
    trunc: int
    certified: Certification = field(default_factory=Certification)
    tau1_zw: MapGerm | None = None

    def H(self, j: int) -> tuple:
        """(f_j, g_j): nonlinear parts of tau_j."""
        return nonlinear_parts(self.tau1 if j == 1 else self.tau2,
                               TAU1_STAR if j == 1 else TAU2_STAR)

    def to_json(self) -> dict:
        return {"trunc": self.trunc, "tau1": self.tau1.to_json(), "tau2": self.tau2.to_json(),
                "certification": self.certified.to_json()}


def certify(pair: InvolutionPair, tau2_direct: MapGerm | None = None,
            from_surface: bool = True) -> Certification:
    N = pair.trunc
    cert = Certification()
    ident = MapGerm.identity(N, XY)
    t1, t2 = pair.tau1, pair.tau2
    cert.involutive = map_compose(t1, t1) == ident and map_compose(t2, t2) == ident
    if not cert.involutive:
        cert.details.append("tau_j o tau_j != id")
    want1, want2 = _coerce_matrix(TAU1_STAR), _coerce_matrix(TAU2_STAR)
    cert.linear_parts = t1.linear_part == want1 and t2.linear_part == want2
    if not cert.linear_parts:
        cert.details.append("linear parts differ from (-x, -2x+y), (-x, 2x+y)")
    fixed = True
    for j in (1, 2):
        for h in pair.H(j):
            if any(c for c in h.restrict_x0()):
                fixed = False
    cert.fixed_locus = fixed
    if not fixed:
        cert.details.append("H_j(0, y) != 0")
    cert.reality = rho_conjugate(t1) == t2
    if not cert.reality:
        cert.details.append("tau_2 != rho tau_1 rho")
    if from_surface:
        f1, g1 = pair.H(1)
        f2, g2 = pair.H(2)
        cert.f_equals_g = f1 == g1 and f2 == -g2
        if not cert.f_equals_g:
            cert.details.append("f_1 != g_1 or f_2 != -g_2")
    else:
        cert.f_equals_g = True
    if tau2_direct is not None:
        cert.tau2_direct = tau2_direct == t2
        if not cert.tau2_direct:
            cert.details.append("rho tau_1 rho differs from the directly solved tau_2")
    return cert


def pair_from_surface(s: Surface, N: int, strict: bool = True) -> InvolutionPair:
    """Extract and certify {tau_1, tau_2} in (x, y) coordinates to degree N."""
    t1_zw = tau1_from_surface(s, N)
    t1 = to_xy(t1_zw)
    t2 = tau2_from_tau1(t1)
    pair = InvolutionPair(t1, t2, N, tau1_zw=t1_zw)
    direct = to_xy(tau2_direct_from_surface(s, N))
    pair.certified = certify(pair, tau2_direct=direct)
    if strict and not pair.certified.ok:
        raise ConsistencyError("surface-derived involution pair failed certification: "
                               + "; ".join(pair.certified.details), N)
    return pair


def linear_pair(N: int) -> InvolutionPair:
    pair = InvolutionPair(tau_star(1, N), tau_star(2, N), N)
    pair.certified = certify(pair)
    return pair


def sigma_and_G(pair: InvolutionPair) -> tuple:
    """sigma = tau_1 tau_2 = (x + G1, 4x + y + G2) and the two inhomogeneities."""
    t1, t2 = pair.tau1, pair.tau2
    sigma = map_compose(t1, t2)
    f1, g1 = pair.H(1)
    f2, g2 = pair.H(2)
    G1 = -f2 + compose(f1, t2)
    G2 = -f2.scale(2) + g2 + compose(g1, t2)
    lin = sigma_star(pair.trunc)
    if sigma.comp1 != lin.comp1 + G1 or sigma.comp2 != lin.comp2 + G2:
        raise ConsistencyError("sigma disagrees with its (G1, G2) assembly", pair.trunc)
    G1.divide_by_x()  # raises unless x | G1
    return sigma, G1, G2


def linear_part_Lq(s: Surface, N: int) -> Series2:
    """The part of q linear in r:  [r_zbar(-z-2w, w) - r_zbar(z, w)] / (2z + 2w).

    Computed as minus the divided difference of r_zbar between -z-2w and z,
    and cross-checked by exact division of the numerator by 2z + 2w.
    """
    rzb = s.r_zbar(N + 1)
    z = Series2.variable(0, N + 1, ZW)
    w = Series2.variable(1, N + 1, ZW)
    moved = -z - w.scale(2)
    Lq = -divided_difference(rzb, moved, z, slot=0, check=True)
    numerator = compose(rzb, MapGerm(moved, w)) - rzb
    by_division = divide_by_linear(numerator, 2, 2)
    if by_division != Lq.truncate(N):
        raise ConsistencyError("Lq: divided difference and exact division disagree", N)
    return by_division
