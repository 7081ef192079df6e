from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from parabolic_nf.errors import ConsistencyError
from parabolic_nf.exactnum import GaussRational
from parabolic_nf.fps import (MapGerm, Series2, compose, conj_twist, divided_difference,
                              implicit_solve, map_compose, map_inverse, mul,
                              partial_derivative)
from parabolic_nf.involutions import TAU1_STAR, TAU2_STAR

N = 6


def xy(N=N):
    return Series2.variable(0, N), Series2.variable(1, N)


def random_series(rng, N, low=0, density=0.5):
    terms = {}
    for d in range(low, N + 1):
        for i in range(d + 1):
            if rng.random() < density:
                terms[(i, d - i)] = GaussRational(rng.randint(-3, 3), rng.randint(-3, 3))
    return Series2.from_terms(terms, N)


def test_mul_examples():
    x, y = xy()
    assert (x + y) * (x - y) == x * x - y * y
    x2, y2 = xy(2)
    assert ((x2 + y2) * (x2 * x2)).is_zero()
    f = random_series(random.Random(1), N)
    assert f * Series2.constant(1, N) == f


def test_mixed_truncation_reduces_to_minimum():
    a = Series2.variable(0, 3)
    b = Series2.variable(0, 5)
    assert (a * b).trunc == 3 and (a + b).trunc == 3


def test_compose_examples():
    x, y = xy()
    t1 = MapGerm.linear(TAU1_STAR, N)
    assert compose(x * x, t1) == x * x
    assert compose(y, t1) == y - x.scale(2)
    shift = MapGerm(x, x.scale(4) + y)
    assert compose(x * y, shift) == (x * x).scale(4) + x * y


def test_linear_compositions():
    t1 = MapGerm.linear(TAU1_STAR, N)
    t2 = MapGerm.linear(TAU2_STAR, N)
    x, y = xy()
    assert map_compose(t1, t2) == MapGerm(x, x.scale(4) + y)
    assert map_compose(t1, t1) == MapGerm.identity(N)


def test_inverse_example():
    x, y = xy()
    m = MapGerm(x + y * y, y)
    assert map_inverse(m) == MapGerm(x - y * y, y)


def test_inverse_rejects_singular_linear_part():
    x, y = xy()
    with pytest.raises((ZeroDivisionError, ValueError, ConsistencyError)):
        map_inverse(MapGerm(x + y * y, x + y * y))


def test_implicit_solve_zero_rhs_is_linear():
    x, y = xy()
    lin = MapGerm(-x - y.scale(2), y)
    out = implicit_solve(lambda cand, t: lin.truncate(t), lin, N)
    assert out == lin


def test_implicit_solve_detects_non_contraction():
    x, y = xy()
    lin = MapGerm(x, y)
    # candidate -> candidate + x^2 never stabilizes
    with pytest.raises(ConsistencyError):
        implicit_solve(lambda cand, t: MapGerm(cand.comp1 + (x * x).truncate(t), cand.comp2), lin, N)


def test_divided_difference_examples():
    z, w = Series2.variable(0, N, ("z", "w")), Series2.variable(1, N, ("z", "w"))
    s2 = Series2.from_terms({(2, 0): 1}, N, ("z", "w"))
    zp = -z - w.scale(2)
    assert divided_difference(s2, zp, z) == zp + z
    s3 = Series2.from_terms({(3, 0): 1}, N, ("z", "w"))
    assert divided_difference(s3, zp, z) == zp * zp + zp * z + z * z
    assert divided_difference(Series2.constant(5, N, ("z", "w")), zp, z).is_zero()


def test_partial_and_twist_examples():
    x, y = xy()
    assert partial_derivative(x * y * y, 1) == (x * y).scale(2).truncate(N - 1)
    f = x.scale(GaussRational(0, 1))
    assert conj_twist(f, (1, -1)) == x.scale(GaussRational(0, -1))
    g = random_series(random.Random(3), N)
    assert conj_twist(conj_twist(g, (1, -1)), (1, -1)) == g


def test_json_dump_format():
    x, y = xy(3)
    f = x.scale(2) + (y * y).scale(GaussRational("1/3", -1))
    data = f.to_json()
    assert data["trunc"] == 3
    assert [(t["i"], t["j"]) for t in data["terms"]] == [(1, 0), (0, 2)]
    assert Series2.from_json(data) == f


def test_no_terms_above_truncation():
    rng = random.Random(7)
    f, g = random_series(rng, 4), random_series(rng, 4, low=1)
    m = MapGerm(Series2.variable(0, 4) + g * g, Series2.variable(1, 4) + g)
    for h in (f * g, f + g, compose(f, m), divided_difference(f, m.comp1, m.comp2)):
        assert h.degree() is None or h.degree() <= h.trunc <= 4


seeds = st.integers(0, 10_000)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_compose_is_ring_morphism(seed):
    rng = random.Random(seed)
    f, g = random_series(rng, 5), random_series(rng, 5)
    m = MapGerm(random_series(rng, 5, low=1), random_series(rng, 5, low=1))
    assert compose(f * g, m) == compose(f, m) * compose(g, m)
    assert compose(f + g, m) == compose(f, m) + compose(g, m)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_inverse_both_sides(seed):
    rng = random.Random(seed)
    x, y = xy(5)
    m = MapGerm(x.scale(2) + y + random_series(rng, 5, low=2),
                y.scale(GaussRational(0, 1)) + random_series(rng, 5, low=2))
    inv = map_inverse(m)
    ident = MapGerm.identity(5)
    assert map_compose(m, inv) == ident and map_compose(inv, m) == ident


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_divided_difference_remultiplies(seed):
    rng = random.Random(seed)
    f = random_series(rng, 6)
    A, B = random_series(rng, 6, low=1), random_series(rng, 6, low=1)
    divided_difference(f, A, B, check=True)  # raises on mismatch
    divided_difference(f, A, B, slot=1, check=True)
