from __future__ import annotations

import random
from math import factorial

import pytest
from hypothesis import given, settings, strategies as st

from parabolic_nf.errors import ConsistencyError
from parabolic_nf.exactnum import GaussRational, i_power
from parabolic_nf.fps import Series2, partial_derivative, substitute_linear
from parabolic_nf.involutions import XY, pair_from_surface, sigma_and_G
from parabolic_nf.linearized import (SIGNED_PAIRS, A_four_terms, A_from_Lq, A_series, K_apply,
                                     P_zbar, S_ab_closed_form, S_series, closed_coefficients,
                                     direct_coefficients, divergence_certificate, gamma_direct,
                                     gamma_five_sum, shift_operator, solve_difference_K,
                                     solve_difference_direct)
from parabolic_nf.surface import Surface, generator_e, generator_of_degree, r_star, random_surface


def xy(N):
    return Series2.variable(0, N, XY), Series2.variable(1, N, XY)


def random_poly(rng, N, low=0, density=0.4):
    terms = {}
    for d in range(low, N + 1):
        for i in range(d + 1):
            if rng.random() < density:
                terms[(i, d - i)] = GaussRational(rng.randint(-4, 4), rng.randint(-4, 4))
    return Series2.from_terms(terms, N, XY)


def test_K_examples():
    x, y = xy(6)
    a = x * x + x.scale(3)
    assert K_apply(a) == a
    assert K_apply(y) == y - x.scale(2)
    f = y * y
    assert shift_operator(f) == (x * y).scale(8) + (x * x).scale(16)
    assert K_apply(shift_operator(f)) == (x * y).scale(8)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_operator_identity(seed):
    rng = random.Random(seed)
    f = random_poly(rng, 10)
    lhs = K_apply(shift_operator(f.as_polynomial(11)))
    rhs = (partial_derivative(f.as_polynomial(12), 1).multiply_by_x()).scale(4).truncate(11)
    assert lhs == rhs


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 100_000))
def test_K_linear_degree_preserving_commutes_with_x(seed):
    rng = random.Random(seed)
    a, b = random_poly(rng, 8), random_poly(rng, 8)
    assert K_apply(a + b) == K_apply(a) + K_apply(b)
    for d in range(9):
        assert K_apply(a.homogeneous(d)) == K_apply(a).homogeneous(d)
    assert K_apply(a.multiply_by_x()) == K_apply(a).multiply_by_x()


def test_difference_examples():
    x, y = xy(5)
    assert solve_difference_direct(Series2.zero(5, XY)).is_zero()
    assert solve_difference_direct(x.scale(-4)) == y
    with pytest.raises(ConsistencyError):
        solve_difference_direct(y * y)


@pytest.mark.parametrize("name", ["e5", "r_star", "random"])
def test_difference_routes_agree_on_surface_G1(name):
    s = {"e5": generator_of_degree(5, 1, 8), "r_star": r_star(8, "1/2"),
         "random": random_surface(8, random.Random(4), density=0.6)}[name]
    _, G1, _ = sigma_and_G(pair_from_surface(s, 8))
    u = solve_difference_direct(G1)
    assert solve_difference_K(G1) == u


def test_A_examples():
    assert A_series(Surface.zero(6), 6).is_zero()
    A = A_series(generator_e(3, 1), 6)
    assert A.lowest_degree() == A.degree() == 3
    rng = random.Random(8)
    r, s = random_surface(8, rng), random_surface(8, rng)
    assert A_series(r + s, 7) == A_series(r, 7) + A_series(s, 7)


def test_A_routes_on_random_surfaces():
    rng = random.Random(10)
    for _ in range(5):
        s = random_surface(9, rng, density=0.7)
        assert A_from_Lq(s, 8) == A_four_terms(s, 8)


def test_A_is_linear_part_of_minus_G1():
    for n in (3, 4, 5):
        e = generator_e(n, 1)
        _, G1, _ = sigma_and_G(pair_from_surface(e, n + 3))
        d = n
        assert G1.homogeneous(d).truncate(d) == -A_series(e, n).homogeneous(d).truncate(d)
        assert G1.lowest_degree() == d


@pytest.mark.parametrize("n", [3, 4, 5, 7, 10])
def test_A_n_against_P_sum(n):
    # 2^(n+2) i^(1-n) x A_n = sum of four P_{n+2,zbar} evaluations
    A = A_series(generator_e(n, 1), n)
    P = P_zbar(n)
    total = Series2.zero(n + 1, XY)
    for (a, b, sign) in ((5, -3, 1), (1, -3, -1), (3, -1, 1), (-1, -1, -1)):
        term = substitute_linear(P, ((a, 1), (b, -1)), XY)
        total = total + term if sign > 0 else total - term
    lhs = A.multiply_by_x().scale(GaussRational(2 ** (n + 2)) * i_power(1 - n))
    assert lhs == total


def test_S_constant_terms():
    for a, b, _ in SIGNED_PAIRS:
        assert S_ab_closed_form(a, b, 4)[0] == 0
    S = S_series(8)
    assert S[:5] == [0, 0, 0, 0, 0]
    assert S[5] == GaussRational("32/9").re


@pytest.mark.parametrize("a,b", [(5, -3), (1, -3), (3, -1), (-1, -1)])
def test_five_sums_against_closed_form_and_operator(a, b):
    S = S_ab_closed_form(a, b, 14)
    for n in range(1, 13):
        g = gamma_five_sum(a, b, n)
        assert g / factorial(n) == S[n + 1]
        assert gamma_direct(a, b, n) == GaussRational(g)
        assert gamma_direct(a, b, n, eps="1/2") == GaussRational(g * GaussRational("1/2").re ** (n + 2))


def test_S_lives_on_odd_degrees():
    S = S_series(30)
    assert all(S[n] == 0 for n in range(0, 31, 2))
    assert all(S[n] != 0 for n in range(5, 31, 2))


def test_zero_surface_certificate_sequence_is_zero():
    assert all(c == 0 for c in direct_coefficients(Surface.zero(12), 12))


def test_direct_equals_closed_small():
    for eps in (1, "1/2", "3"):
        N = 14
        direct = direct_coefficients(r_star(N + 1, eps), N)
        assert direct == closed_coefficients(N, eps)


def test_certificate_structure():
    cert = divergence_certificate(20, 1)
    data = cert.to_json()
    assert data["N"] == 20 and len(data["table"]) == 19
    assert cert.routes_agree and cert.growth_increasing
    assert cert.s_radius_estimate > 0.25
    csv = cert.to_csv().splitlines()
    assert csv[0] == "n,s_root" and len(csv) == 20


def test_certificate_rejects_bad_input():
    with pytest.raises(ValueError):
        divergence_certificate(4, 1)
    with pytest.raises(ValueError):
        divergence_certificate(20, 0)
