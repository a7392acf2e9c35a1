"""Lagrangian graphs over R^m and the special Lagrangian graph equation.

The graph of df over R^m is Lagrangian for any potential f; it is special
Lagrangian exactly when Im det_C(I + i Hess f) = 0.  Expanding the complex
determinant in the eigenvalues of A = Hess f gives the odd elementary
symmetric combination

    Im prod_j (1 + i lambda_j) = e_1(A) - e_3(A) + e_5(A) - ...

whose linear term e_1(A) = tr A = Laplacian(f) is the linearization of the
equation at f = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


class OutOfStencilError(IndexError):
    """Central differences were requested at a node without interior margin."""


@dataclass
class GraphPotential:
    """A scalar potential on R^m, either gridded samples or a closed form.

    For gridded potentials `values` is an m-dimensional array sampled on a
    uniform rectangular grid with per-axis `spacing`; for closed forms pass
    a callable `func` taking an (m,) point (second derivatives are then
    taken by tight central differences).
    """

    m: int
    values: np.ndarray | None = None
    spacing: np.ndarray | None = None
    func: Callable[[np.ndarray], float] | None = None
    fd_step: float = 1e-5

    def __post_init__(self):
        if (self.values is None) == (self.func is None):
            raise ValueError("provide exactly one of values or func")
        if self.values is not None:
            self.values = np.asarray(self.values, dtype=float)
            if self.values.ndim != self.m:
                raise ValueError("grid dimensionality does not match m")
            if not np.all(np.isfinite(self.values)):
                raise ValueError("potential has non-finite samples")
            self.spacing = np.broadcast_to(
                np.asarray(self.spacing, dtype=float), (self.m,)).copy()
            if np.any(self.spacing <= 0):
                raise ValueError("grid spacing must be positive")


def hessian(f: GraphPotential, node) -> np.ndarray:
    """Symmetrized central-difference Hessian of f at a node (or point)."""
    m = f.m
    if f.func is not None:
        x = np.asarray(node, dtype=float)
        h = f.fd_step
        H = np.empty((m, m))
        f0 = f.func(x)
        for i in range(m):
            ei = np.zeros(m)
            ei[i] = h
            H[i, i] = (f.func(x + ei) - 2.0 * f0 + f.func(x - ei)) / h ** 2
            for j in range(i + 1, m):
                ej = np.zeros(m)
                ej[j] = h
                H[i, j] = (f.func(x + ei + ej) - f.func(x + ei - ej)
                           - f.func(x - ei + ej) + f.func(x - ei - ej)) / (4.0 * h ** 2)
                H[j, i] = H[i, j]
        return 0.5 * (H + H.T)

    idx = tuple(int(k) for k in node)
    for ax, k in enumerate(idx):
        if k < 1 or k > f.values.shape[ax] - 2:
            raise OutOfStencilError("node %r lacks a one-node margin on axis %d" % (idx, ax))
    H = np.empty((m, m))
    h = f.spacing
    for i in range(m):
        up = list(idx); up[i] += 1
        dn = list(idx); dn[i] -= 1
        H[i, i] = (f.values[tuple(up)] - 2.0 * f.values[idx] + f.values[tuple(dn)]) / h[i] ** 2
        for j in range(i + 1, m):
            pp = list(idx); pp[i] += 1; pp[j] += 1
            pm = list(idx); pm[i] += 1; pm[j] -= 1
            mp = list(idx); mp[i] -= 1; mp[j] += 1
            mm = list(idx); mm[i] -= 1; mm[j] -= 1
            H[i, j] = (f.values[tuple(pp)] - f.values[tuple(pm)]
                       - f.values[tuple(mp)] + f.values[tuple(mm)]) / (4.0 * h[i] * h[j])
            H[j, i] = H[i, j]
    return 0.5 * (H + H.T)


def sl_graph_residual(f: GraphPotential, node) -> float:
    """Im det_C(I + i Hess f) at the node, via the complex determinant."""
    A = hessian(f, node)
    return residual_from_hessian(A)


def residual_from_hessian(A: np.ndarray) -> float:
    """Im det_C(I + iA) for a symmetric matrix A."""
    A = np.asarray(A, dtype=float)
    return float(np.linalg.det(np.eye(A.shape[0]) + 1j * A).imag)


def residual_symmetric_form(A: np.ndarray) -> float:
    """The same residual through elementary symmetric functions.

    Im prod(1 + i lambda_j) = sum over odd k of (-1)^{(k-1)/2} e_k(A).
    """
    A = np.asarray(A, dtype=float)
    m = A.shape[0]
    if m > 4:
        raise ValueError("symmetric-function form implemented for m <= 4")
    lam = np.linalg.eigvalsh(A)
    # e_k from the characteristic polynomial coefficients of lam
    coeffs = np.poly(lam)  # x^m - e1 x^{m-1} + e2 x^{m-2} - ...
    e = [(-1) ** k * coeffs[k] for k in range(m + 1)]
    total = 0.0
    for k in range(1, m + 1, 2):
        total += (-1) ** ((k - 1) // 2) * e[k]
    return float(total)


def linearization_gap(f: GraphPotential, eps_list) -> list[float]:
    """max-node |residual(eps * f) - eps * Laplacian(f)| for each eps.

    Measures the size of the nonlinear tail of the graph equation; for
    m = 3 potentials it equals eps^3 |det Hess f| at each node.
    """
    gaps = []
    nodes = _interior_nodes(f)
    hessians = [hessian(f, node) for node in nodes]
    for eps in eps_list:
        worst = 0.0
        for A in hessians:
            res = residual_from_hessian(eps * A)
            lin = eps * np.trace(A)
            worst = max(worst, abs(res - lin))
        gaps.append(worst)
    return gaps


def loglog_slope(xs, ys) -> float:
    """Least-squares slope of log(y) against log(x)."""
    xs = np.log(np.asarray(xs, dtype=float))
    ys = np.log(np.asarray(ys, dtype=float))
    return float(np.polyfit(xs, ys, 1)[0])


def _interior_nodes(f: GraphPotential):
    if f.func is not None:
        # a small default probe box around the origin
        axes = [np.linspace(-1.0, 1.0, 5)] * f.m
        return [np.array(p) for p in np.stack(
            np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, f.m)]
    ranges = [range(1, n - 1) for n in f.values.shape]
    out = []
    grids = np.meshgrid(*[np.asarray(list(r)) for r in ranges], indexing="ij")
    for idx in np.stack(grids, axis=-1).reshape(-1, f.m):
        out.append(tuple(int(k) for k in idx))
    return out
