from __future__ import annotations

import pytest

from parabolic_nf.errors import ConsistencyError, ThresholdUnreachable
from parabolic_nf.exactnum import GaussRational
from parabolic_nf.fps import Series2
from parabolic_nf.involutions import XY, linear_pair, pair_from_surface
from parabolic_nf.linearized import A_series, solve_difference_direct
from parabolic_nf.normalform import (TransformSlice, conjugacy_defects, d2f_matrix,
                                     homogeneous_L, kernel_of_d2f, normalization_holds,
                                     normalize_pair, normalize_surface, perturb_to_large_coeffs,
                                     residual_degree, system_rank, triangularity_check)
from parabolic_nf.surface import Surface, generator_of_degree, metric_d, r_star


def test_linear_pair_gives_identity():
    phi = normalize_pair(linear_pair(8))
    assert phi.u.is_zero() and phi.v.is_zero()


def test_r_star_8_residual_degree():
    phi = normalize_surface(r_star(8, "1/2"), 8)
    assert phi.residual_degree == 9
    assert phi.normalization_ok()
    assert all(d.is_zero() for d in conjugacy_defects(pair_from_surface(r_star(8, "1/2"), 8),
                                                      phi.u, phi.v, 8))


@pytest.mark.parametrize("k", range(2, 7))
def test_kernel_of_unnormalized_system(k):
    kernel = kernel_of_d2f(k)
    assert len(kernel) == 1
    ker = kernel[0]
    x, y = Series2.variable(0, k, XY), Series2.variable(1, k, XY)
    if k % 2:
        assert (ker.u, ker.v) == (x ** k, (x ** (k - 1)) * y)
    else:
        assert ker.u.is_zero() and ker.v == x ** k
    # the kernel direction always breaks the normalization
    assert not normalization_holds(ker.u, ker.v)
    assert system_rank(k) == 2 * (k + 1)
    assert system_rank(k, with_normalization=False) == 2 * (k + 1) - 1


def test_perturbing_by_kernel_breaks_uniqueness_conditions():
    s = r_star(8, 1)
    phi = normalize_surface(s, 6)
    for k in range(2, 7):
        ker = kernel_of_d2f(k)[0]
        u = phi.u + ker.u.as_polynomial(6)
        v = phi.v + ker.v.as_polynomial(6)
        pair = pair_from_surface(s, 6)
        # still conjugates (kernel of the linearized operator at top degree only) ...
        if k == 6:
            assert residual_degree(pair, u, v, 6) == 7
        # ... but violates the normalization
        assert not normalization_holds(u, v)


def test_homogeneous_L_zero():
    assert homogeneous_L(Surface.zero(6), 4).is_zero()


def test_homogeneous_L_matches_linearized_solution():
    e5 = generator_of_degree(5, 1)
    L = homogeneous_L(e5)
    u = solve_difference_direct(-A_series(e5, 3))
    diff = L.u - u.homogeneous(3)
    # equal up to a multiple of x^3
    assert all(diff.coeff(i, 3 - i) == 0 for i in range(3))


def test_L_additivity_across_degrees():
    e5, e7 = generator_of_degree(5, 1, 7), generator_of_degree(7, 1, 7)
    full = normalize_surface(e5 + e7, 5)
    lower = normalize_surface(e5, 5)
    assert full.slice(5) == lower.slice(5) + homogeneous_L(e7, 5)


def test_triangularity_examples():
    assert triangularity_check(Surface.zero(6), 6).ok
    e6 = generator_of_degree(6, 1)
    assert normalize_surface(e6, 4).slice(4) == homogeneous_L(e6)
    s = r_star(10, 1)
    # index-5 output ignores input slices of index >= 6 (total degree >= 8)
    assert normalize_surface(s, 5).slice(5) == normalize_surface(s.truncated_index(5), 5).slice(5)


def test_triangularity_report_r_star():
    rep = triangularity_check(r_star(9, "1/2"), 7)
    assert rep.ok, rep.to_json()


def test_inconsistent_pair_raises():
    pair = pair_from_surface(Surface.from_terms(5, {(3, 2): 1}), 5)
    x = Series2.variable(0, 5, XY)
    pair.tau2 = type(pair.tau2)(pair.tau2.comp1 + x * x * x, pair.tau2.comp2)
    with pytest.raises(ConsistencyError) as err:
        normalize_pair(pair)
    assert "degree 3" in str(err.value)


def test_perturb_base_zero_degree_5():
    e5 = generator_of_degree(5, 1)
    passes = homogeneous_L(e5).dtilde_at_least("1/2")
    res = perturb_to_large_coeffs(Surface.zero(5), [5], 1)
    assert passes and res.steps[0].perturbed
    assert res.surface.slice(5) == e5.slice(5)


def test_perturb_keeps_base_when_threshold_holds_and_is_idempotent():
    base = Surface.zero(7)
    first = perturb_to_large_coeffs(base, [5, 7], 4)
    again = perturb_to_large_coeffs(first.surface, [5, 7], 4)
    assert again.surface == first.surface
    assert not any(step.perturbed for step in again.steps)
    assert metric_d(base, first.surface).at_most(4)


def test_perturb_unreachable_reports_degree():
    with pytest.raises(ThresholdUnreachable) as err:
        perturb_to_large_coeffs(Surface.zero(7), [5, 7], 1)
    assert err.value.degree == 7 and err.value.rank == 2


def test_matrix_shape():
    rows = d2f_matrix(4)
    assert len(rows) == 4 * 5 + 2 and all(len(r) == 10 for r in rows)
