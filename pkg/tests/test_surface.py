from __future__ import annotations

import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from parabolic_nf.errors import SurfaceInputError
from parabolic_nf.exactnum import GaussRational
from parabolic_nf.surface import (Surface, degree_to_index, generator_e, index_to_degree,
                                  metric_d, r_star, random_surface, validate)


def test_validate_examples():
    assert validate(Surface.from_terms(5, {(3, 2): 1})) == []
    bad = validate(Surface.from_terms(4, {(3, 1): 1}))
    assert [(v.kind, v.where) for v in bad] == [("lagrangian", 4)]
    unreal = Surface.from_terms(5, {(3, 2): 1}, fill_reality=False)
    assert any(v.kind == "reality" and v.where == (3, 2) for v in validate(unreal))


def test_low_degree_rejected():
    assert any(v.kind == "low-degree" for v in validate(Surface.from_terms(4, {(2, 1): 1})))


def test_generator_examples():
    assert generator_e(2, 1).is_zero()
    assert generator_e(3, 1) == Surface.from_terms(5, {(3, 2): -1})
    for n in range(2, 13):
        assert validate(generator_e(n, "1/3")) == []


def test_r_star_examples():
    assert r_star(5, 1).coeffs == Surface.from_terms(5, {(3, 2): -1}).coeffs
    assert validate(r_star(12, "1/2")) == []
    for N in (5, 8, 13):
        assert metric_d(r_star(N, "2/3"), Surface.zero(N)).equals("2/3")


def test_metric_examples():
    s = r_star(9, "1/2")
    assert metric_d(s, s).value == 0.0
    for n in range(3, 9):
        assert metric_d(generator_e(n, "1/2"), Surface.zero(n + 2)).equals("1/2")


def test_index_accessors():
    assert index_to_degree(3) == 5 and degree_to_index(5) == 3
    s = r_star(9, 1)
    assert s.slice_index(3) == s.slice(5)
    assert s.truncated_index(4).degrees() == [5, 6]


def test_file_round_trip(tmp_path):
    s = random_surface(7, random.Random(5))
    path = tmp_path / "s.json"
    path.write_text(json.dumps(s.to_json()))
    assert Surface.load(path) == s


def test_file_lists_only_upper_triangle():
    data = {"trunc": 5, "terms": [{"i": 3, "j": 2, "c": {"re": ["1", "1"], "im": ["1", "2"]}}]}
    s = Surface.from_json(data)
    assert s.coeff(2, 3) == GaussRational(1, "-1/2")


@pytest.mark.parametrize("data", [
    {"trunc": 5, "terms": [], "extra": 1},
    {"trunc": 5, "terms": [{"i": 3, "j": 2, "c": {"re": ["1", "1"], "im": ["0", "1"]}},
                           {"i": 2, "j": 3, "c": {"re": ["2", "1"], "im": ["0", "1"]}}]},
    {"terms": []},
    [1, 2],
])
def test_file_errors(data):
    with pytest.raises(SurfaceInputError):
        Surface.from_json(data)


def test_random_surfaces_are_admissible():
    rng = random.Random(11)
    for _ in range(20):
        assert validate(random_surface(9, rng, density=0.7)) == []


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_metric_axioms(seed):
    rng = random.Random(seed)
    r, s, t = (random_surface(7, rng, density=0.5) for _ in range(3))
    assert metric_d(r, s).value == metric_d(s, r).value
    assert metric_d(r, r).value == 0.0
    assert (metric_d(r, s).value == 0.0) == (r == s)
    # x -> x^(1/m) is subadditive, so the triangle inequality holds termwise
    assert metric_d(r, s).value <= (metric_d(r, t).value + metric_d(t, s).value) * (1 + 1e-12)


def test_strong_triangle_inequality_fails():
    # |1 - (-1)|^(1/5) = 2^(1/5) exceeds max(d(r, 0), d(0, s)) = 1
    r = Surface.from_terms(5, {(3, 2): 1})
    s = Surface.from_terms(5, {(3, 2): -1})
    zero = Surface.zero(5)
    assert metric_d(r, zero).equals(1) and metric_d(zero, s).equals(1)
    assert not metric_d(r, s).at_most(1)
