"""Tests for the U(1)-invariant Dirichlet solver and its lift to C^3."""

import warnings

import numpy as np
import pytest

from slgeo import u1


def _disc(n=65):
    return u1.ConvexDomain("disc", n=n)


def test_domain_forces_odd_grid():
    dom = u1.ConvexDomain("disc", n=64)
    assert dom.n % 2 == 1
    assert dom.is_symmetric()


def test_affine_data_reproduced_exactly():
    # P annihilates affine functions, so f = b x + c y solves at once
    b, c = 0.4, -0.2
    phi = u1.BoundaryData(lambda x, y: b * np.asarray(x) + c * np.asarray(y))
    sol = u1.solve_dirichlet(phi, 1.0, _disc(), tol=1e-10)
    assert sol.residual_P < 1e-10
    inside = sol.domain.inside
    assert np.max(np.abs(sol.v.values[inside] - b)) < 1e-12
    assert np.max(np.abs(sol.u.values[inside] - c)) < 1e-12


def test_quadratic_data_converges():
    phi = u1.BoundaryData(lambda x, y: 0.2 * np.asarray(x) ** 2)
    sol = u1.solve_dirichlet(phi, 0.5, _disc(), tol=1e-10)
    assert sol.residual_P < 1e-9
    assert sol.newton_iters >= 1
    assert np.isfinite(sol.residual_CR)


def test_two_initial_guesses_agree():
    tol = 1e-10
    phi = u1.BoundaryData(lambda x, y: 0.2 * np.asarray(x) ** 2
                          + 0.1 * np.asarray(y))
    dom = _disc()
    s1 = u1.solve_dirichlet(phi, 0.7, dom, tol=tol)
    s2 = u1.solve_dirichlet(phi, 0.7, dom, tol=tol,
                            initial=np.zeros_like(s1.fvec))
    assert np.max(np.abs(s1.fvec - s2.fvec)) < 10.0 * tol


def test_p_operator_matches_packaged_residual():
    phi = u1.BoundaryData(lambda x, y: 0.2 * np.asarray(x) ** 2)
    dom = _disc()
    sol = u1.solve_dirichlet(phi, 0.5, dom, tol=1e-10)
    res = u1.p_operator(sol.f, 0.5, dom, phi)
    assert abs(np.nanmax(np.abs(res.values)) - sol.residual_P) < 1e-13


def test_continuation_reaches_a_zero():
    phi = u1.BoundaryData(lambda x, y: 0.2 * np.asarray(x) ** 2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", u1.ContinuationStalledWarning)
        sol = u1.solve_dirichlet(phi, 0.0, _disc(), tol=1e-8)
    assert sol.a == 0.0
    assert sol.continuation_a is not None and sol.continuation_a < 1e-2
    assert sol.residual_P < 1e-7


def test_singular_point_of_transversal_zero():
    # boundary x^2 + 0.2 x: v = f_x crosses zero once on the y = 0 chord
    phi = u1.BoundaryData(lambda x, y: np.asarray(x) ** 2
                          + 0.2 * np.asarray(x))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", u1.ContinuationStalledWarning)
        sol = u1.solve_dirichlet(phi, 0.0, _disc(), tol=1e-8)
    pts = u1.singular_points(sol)
    assert len(pts) == 1
    x, z = pts[0]
    assert abs(x) < 0.3
    assert abs(z.real - x) < 1e-14


def test_zero_data_singular_segment():
    # f = 0 makes v vanish on the whole chord: a segment of zeros, one
    # reported node per chord point rather than a single crossing
    phi = u1.BoundaryData(lambda x, y: np.zeros_like(np.asarray(x, dtype=float)))
    sol = u1.solve_dirichlet(phi, 0.0, _disc(33), tol=1e-8)
    pts = u1.singular_points(sol)
    assert len(pts) > 5


def test_singular_points_empty_for_nonzero_a():
    phi = u1.BoundaryData(lambda x, y: 0.2 * np.asarray(x) ** 2)
    sol = u1.solve_dirichlet(phi, 0.5, _disc(33), tol=1e-8)
    assert u1.singular_points(sol) == []


def test_winding_number_oracle():
    t = np.linspace(0.0, 2 * np.pi, 200, endpoint=False)
    loop1 = np.stack([np.cos(t), np.sin(t)], axis=1)
    assert u1.winding_number(loop1) == 1
    loop2 = np.stack([np.cos(2 * t), np.sin(2 * t)], axis=1)
    assert u1.winding_number(loop2) == 2
    shifted = loop1 + np.array([5.0, 0.0])
    assert u1.winding_number(shifted) == 0


def test_difference_zeros_identical_flag():
    phi = u1.BoundaryData(lambda x, y: 0.2 * np.asarray(x) ** 2)
    dom = _disc(33)
    sol = u1.solve_dirichlet(phi, 0.5, dom, tol=1e-10)
    rep = u1.difference_zeros(sol, sol)
    assert rep.identical


def test_difference_zeros_distinct_data():
    dom = _disc(33)
    phi1 = u1.BoundaryData(lambda x, y: 0.2 * np.asarray(x) ** 2)
    phi2 = u1.BoundaryData(lambda x, y: 0.2 * np.asarray(x) ** 2
                           + 0.15 * np.asarray(x))
    s1 = u1.solve_dirichlet(phi1, 0.5, dom, tol=1e-10)
    s2 = u1.solve_dirichlet(phi2, 0.5, dom, tol=1e-10)
    rep = u1.difference_zeros(s1, s2)
    assert not rep.identical
    assert rep.total >= 0
    assert rep.total == sum(abs(w) for _, w in rep.zeros)


def test_lift_moment_value_is_2a():
    a = 0.35
    phi = u1.BoundaryData(lambda x, y: 0.2 * np.asarray(x) ** 2)
    sol = u1.solve_dirichlet(phi, a, _disc(65), tol=1e-10)
    cloud = u1.lift_to_sl3(sol)
    assert len(cloud.points) > 1000
    assert np.max(np.abs(cloud.moment_values - 2.0 * a)) < 1e-12


def test_lift_defect_shrinks_under_refinement():
    a = 0.5
    phi = u1.BoundaryData(lambda x, y: 0.2 * np.asarray(x) ** 2)
    defects = []
    for n in (33, 65):
        sol = u1.solve_dirichlet(phi, a, _disc(n), tol=1e-10)
        cloud = u1.lift_to_sl3(sol)
        defects.append(np.nanmax(cloud.sl_defects))
    assert defects[1] < 0.3 * defects[0]


def test_invalid_tol_rejected():
    phi = u1.BoundaryData(lambda x, y: np.zeros_like(np.asarray(x, dtype=float)))
    with pytest.raises(ValueError):
        u1.solve_dirichlet(phi, 1.0, _disc(33), tol=0.0)
