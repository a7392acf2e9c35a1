"""Tests for the special Lagrangian graph equation residuals."""

import numpy as np
import pytest

from slgeo import graphs


def test_residual_forms_agree_on_random_matrices():
    rng = np.random.default_rng(2)
    for _ in range(500):
        m = rng.integers(2, 5)
        A = rng.standard_normal((m, m))
        A = 0.5 * (A + A.T)
        r1 = graphs.residual_from_hessian(A)
        r2 = graphs.residual_symmetric_form(A)
        assert abs(r1 - r2) < 1e-12


def test_witness_hessian_value():
    # diag(1, 1, -2) in m = 3: sigma_1 = 0, sigma_3 = -2, residual
    # -sigma_1 + sigma_3 = -2, reported with the sign convention
    # Im det(I + iA) = sigma_1 - sigma_3
    A = np.diag([1.0, 1.0, -2.0])
    assert abs(graphs.residual_symmetric_form(A) - 2.0) < 1e-12
    assert abs(graphs.residual_from_hessian(A) - 2.0) < 1e-12


def test_harmonic_potential_solves_small_hessian_limit():
    # for m = 2 the residual is exactly the Laplacian: trace of the Hessian
    A = np.array([[0.3, 0.1], [0.1, -0.3]])
    assert abs(graphs.residual_symmetric_form(A) - np.trace(A)) < 1e-14


def test_gridded_potential_residual():
    # f = (x^2 - y^2)/2 is harmonic with constant Hessian diag(1, -1):
    # sigma_1 = 0 so the graph residual vanishes identically
    n = 21
    xs = np.linspace(-1.0, 1.0, n)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    f = graphs.GraphPotential(2, values=0.5 * (X ** 2 - Y ** 2),
                              spacing=(xs[1] - xs[0], xs[1] - xs[0]))
    for node in ((5, 5), (10, 10), (15, 4)):
        assert abs(graphs.sl_graph_residual(f, node)) < 1e-10


def test_out_of_stencil_rejected():
    f = graphs.GraphPotential(2, values=np.zeros((5, 5)), spacing=(0.1, 0.1))
    with pytest.raises(graphs.OutOfStencilError):
        graphs.hessian(f, (0, 2))


def test_linearization_cubic_gap():
    # for m = 3 the residual minus its linearization is exactly the cubic
    # term eps^3 det(Hess f), so the gap decays with log-log slope 3
    def potential(x):
        return (np.cos(x[0]) * np.sin(x[1]) * np.cos(x[2])
                + 0.2 * x[0] * x[1] * x[2])

    f = graphs.GraphPotential(3, func=potential)
    eps = [0.1, 0.05, 0.025, 0.0125]
    gaps = graphs.linearization_gap(f, eps)
    slope = graphs.loglog_slope(eps, gaps)
    assert abs(slope - 3.0) < 0.05


def test_loglog_slope_exact_power():
    xs = np.array([1.0, 0.5, 0.25])
    ys = 3.0 * xs ** 2
    assert abs(graphs.loglog_slope(xs, ys) - 2.0) < 1e-12
