"""Tests for the torus Monge-Ampere solver, Ricci forms, and the radial
Ricci-flat profile."""

import numpy as np
import pytest

from slgeo import calabi


def _recovery_error(path, phi_exact):
    target = phi_exact.values - np.mean(phi_exact.values)
    return float(np.max(np.abs(path.phi.values - target)))


def test_zero_source_gives_zero_potential():
    f = calabi.TorusField(1, np.zeros((16, 16)))
    path = calabi.solve_calabi(f, tol=1e-12, t_steps=2)
    assert np.max(np.abs(path.phi.values)) < 1e-13
    assert path.residual < 1e-13


def test_m1_discrete_manufactured_recovery():
    # forcing built from the discrete operator is recovered to round-off
    phi = calabi.TorusField.from_function(
        1, 32, lambda x, y: 0.1 * np.cos(x) * np.cos(y))
    det = calabi.ma_operator(phi)
    f = calabi.TorusField(1, np.log(det.values))
    path = calabi.solve_calabi(calabi.normalize_source(f), tol=1e-13,
                               t_steps=2)
    assert _recovery_error(path, phi) < 1e-12


def test_m1_agrees_with_poisson():
    # the m = 1 equation is linear, so the continuity solve must land on
    # the direct Poisson solution
    f = calabi.normalize_source(calabi.TorusField.from_function(
        1, 32, lambda x, y: 0.1 * np.sin(x + y)))
    p1 = calabi.solve_calabi(f, tol=1e-13, t_steps=1).phi.values
    p2 = calabi.poisson_reference_solution(f).values
    assert np.max(np.abs(p1 - p2)) < 1e-10


def test_m2_discrete_manufactured_recovery():
    phi = calabi.TorusField.from_function(
        2, 16, lambda x1, y1, x2, y2: 0.05 * np.cos(x1) * np.cos(y2))
    det = calabi.ma_operator(phi)
    f = calabi.TorusField(2, np.log(det.values))
    path = calabi.solve_calabi(calabi.normalize_source(f), tol=1e-11,
                               t_steps=3)
    assert _recovery_error(path, phi) < 1e-9


def test_positivity_guard():
    # a potential with huge concavity loses positivity of 1 + H
    phi = calabi.TorusField.from_function(
        1, 16, lambda x, y: 3.0 * np.cos(x))
    with pytest.raises(calabi.NonKahlerIterateError):
        calabi.ma_operator(phi)


def test_manufactured_order_two_m1():
    errs = []
    for n in (16, 32, 64):
        phi_e = calabi.TorusField.from_function(
            1, n, lambda x, y: 0.1 * np.cos(x) * np.cos(y))
        # analytic volume ratio 1 + Lap(phi)/2 = 1 - 0.1 cos x cos y
        f = calabi.TorusField.from_function(
            1, n, lambda x, y: np.log(1.0 - 0.1 * np.cos(x) * np.cos(y)))
        path = calabi.solve_calabi(calabi.normalize_source(f), tol=1e-12,
                                   t_steps=1)
        errs.append(_recovery_error(path, phi_e))
    slopes = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(np.abs(slopes - 2.0) < 0.1)


def test_mean_constraint_and_c_values():
    f = calabi.normalize_source(calabi.TorusField.from_function(
        1, 16, lambda x, y: 0.2 * np.cos(x)))
    path = calabi.solve_calabi(f, tol=1e-12, t_steps=4)
    assert abs(path.phi.mean()) < 1e-13
    assert len(path.c_values) == len(path.steps)
    # c_1 approaches the analytic normalization constant as t -> 1
    assert abs(path.c_values[-1]
               + np.log(np.mean(np.exp(f.values)))) < 1e-10


# ---------------------------------------------------------------------------
# Ricci forms


def test_flat_ratio_has_zero_ricci():
    ratio = calabi.TorusField(1, np.full((16, 16), 2.5))
    coeff, res = calabi.ricci_form(ratio)
    assert np.max(np.abs(coeff)) < 1e-13
    assert res < 1e-13


def test_ricci_conformal_change_m2():
    # multiplying the ratio by e^g shifts the Ricci coefficients by the
    # complex Hessian of -g/... (rho' = rho - i ddbar g)
    base = calabi.TorusField.from_function(
        2, 16, lambda a, b, c, d: np.exp(0.05 * np.cos(a) * np.cos(d)))
    rho, res = calabi.ricci_form(base)
    assert res < 1e-12
    g = calabi.TorusField.from_function(
        2, 16, lambda a, b, c, d: 0.02 * np.sin(a + c))
    shifted = calabi.TorusField(2, base.values * np.exp(g.values))
    rho2, _ = calabi.ricci_form(shifted)
    H11, H22, H12 = calabi._complex_hessian(g)
    assert np.max(np.abs(rho2[..., 0, 0] - (rho[..., 0, 0] - 0.5 * H11))) < 1e-13
    assert np.max(np.abs(rho2[..., 1, 1] - (rho[..., 1, 1] - 0.5 * H22))) < 1e-13
    assert np.max(np.abs(rho2[..., 0, 1] - (rho[..., 0, 1] - 0.5 * H12))) < 1e-13


def test_solved_metric_ricci_matches_source():
    # after solving det(I + H) = e^{f + c}, the Ricci form of the volume
    # ratio equals -i ddbar (f + c) = -i ddbar f up to O(h^2)
    n = 32
    f = calabi.normalize_source(calabi.TorusField.from_function(
        1, n, lambda x, y: 0.1 * np.cos(x) * np.cos(y)))
    path = calabi.solve_calabi(f, tol=1e-12, t_steps=1)
    ratio = calabi.ma_operator(path.phi)
    coeff, _ = calabi.ricci_form(ratio)
    H11, _, _ = calabi._complex_hessian(f)
    assert np.max(np.abs(coeff + H11)) < 1e-10


def test_nonpositive_ratio_rejected():
    bad = calabi.TorusField(1, np.full((8, 8), -1.0))
    with pytest.raises(calabi.InvalidVolumeError):
        calabi.ricci_form(bad)


# ---------------------------------------------------------------------------
# the radial Ricci-flat profile on C^2


def test_radial_profile_flat_case():
    prof = calabi.radial_ricci_flat_profile(0.0)
    assert prof.conserved_residual < 1e-10
    assert prof.ricci_residual < 1e-8
    # C = 0 is the flat metric: f' = 1
    assert np.max(np.abs(prof.fprime - 1.0)) < 1e-10


def test_radial_profile_nontrivial_case():
    prof = calabi.radial_ricci_flat_profile(1.0)
    assert prof.conserved_residual < 1e-8
    assert prof.ricci_residual < 1e-6
    # h = f' decreases toward 1 at infinity
    assert prof.fprime[0] > prof.fprime[-1] > 1.0


def test_radial_profile_domain_guard():
    with pytest.raises(ValueError):
        calabi.radial_ricci_flat_profile(1.0, u_max=1.0)
