"""Dirichlet solver for the U(1)-invariant potential equation on convex domains.

The equation solved is

    P(f) = ((df/dx)^2 + y^2 + a^2)^{-1/2} d2f/dx2 + 2 d2f/dy2 = 0

on a strictly convex domain S symmetric under (x, y) -> (x, -y), with
f = phi on the boundary.  Writing u = df/dy and v = df/dx, solutions are
equivalent to the nonlinear Cauchy-Riemann system

    du/dx = dv/dy,    dv/dx = -2 (v^2 + y^2 + a^2)^{1/2} du/dy,

and lift to U(1)-invariant special Lagrangian 3-folds of C^3 through

    z1 z2 = v + i y,   z3 = x + i u,   |z1|^2 - |z2|^2 = 2a.

Discretization: second-order finite differences on a boundary-fitted mask
(Shortley-Weller unequal arms at cut nodes, boundary values injected along
grid lines), damped Newton with a harmonic-extension initial guess, and
continuation a_k = a0 * 2^{-k} for the degenerate a = 0 problem.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .core import TangentPlane, sl_defect, standard_cy_package
from .gridio import GridField

EPS_REG = 1e-12  # coefficient clamp guard for a = 0 evaluation only


class NewtonDivergenceError(RuntimeError):
    """Damped Newton failed; carries the last residual norm."""

    def __init__(self, msg, residual):
        super().__init__(msg)
        self.residual = residual


class HypothesisViolationWarning(UserWarning):
    """Domain does not satisfy the symmetry hypothesis of the solver."""


@dataclass
class ConvexDomain:
    """A disc or axis-aligned ellipse, gridded on its bounding box.

    n is the node count per axis (forced odd so that the y = 0 symmetry
    line is a grid row).  Nodes strictly inside the domain are active;
    arms cut by the boundary carry the fractional arm length and the cut
    point for Dirichlet injection.
    """

    kind: str = "disc"
    rx: float = 1.0
    ry: float = 1.0
    n: int = 33

    def __post_init__(self):
        if self.kind not in ("disc", "ellipse"):
            raise ValueError("kind must be disc or ellipse")
        if self.kind == "disc":
            self.ry = self.rx
        if self.rx <= 0 or self.ry <= 0:
            raise ValueError("radii must be positive")
        if self.n < 17:
            raise ValueError("grid resolution must be >= 17")
        if self.n % 2 == 0:
            self.n += 1
        self.hx = 2.0 * self.rx / (self.n - 1)
        self.hy = 2.0 * self.ry / (self.n - 1)
        self.x = -self.rx + self.hx * np.arange(self.n)
        self.y = -self.ry + self.hy * np.arange(self.n)
        X, Y = np.meshgrid(self.x, self.y, indexing="ij")
        self.inside = (X / self.rx) ** 2 + (Y / self.ry) ** 2 < 1.0 - 1e-12
        self.index = -np.ones((self.n, self.n), dtype=int)
        ii, jj = np.nonzero(self.inside)
        self.index[ii, jj] = np.arange(ii.size)
        self.nodes = np.stack([ii, jj], axis=1)
        self._build_arms()

    def _level(self, x, y):
        return (x / self.rx) ** 2 + (y / self.ry) ** 2 - 1.0

    def _cut_fraction(self, x, y, dx, dy):
        """Fraction t in (0, 1] with (x + t dx, y + t dy) on the boundary."""
        A = (dx / self.rx) ** 2 + (dy / self.ry) ** 2
        B = 2.0 * (x * dx / self.rx ** 2 + y * dy / self.ry ** 2)
        C = self._level(x, y)
        disc = B * B - 4.0 * A * C
        t = (-B + np.sqrt(max(disc, 0.0))) / (2.0 * A)
        return min(max(t, 1e-6), 1.0)

    def _build_arms(self):
        """Per inside node and direction: (neighbor unknown index or -1,
        arm length, cut point)."""
        dirs = [(1, 0), (-1, 0), (0, 1), (0, -1)]
        N = self.nodes.shape[0]
        self.arm_nbr = -np.ones((N, 4), dtype=int)
        self.arm_len = np.empty((N, 4))
        self.arm_cut = np.zeros((N, 4, 2))
        self.full_stencil = np.ones(N, dtype=bool)
        for k, (i, j) in enumerate(self.nodes):
            for d, (di, dj) in enumerate(dirs):
                ni, nj = i + di, j + dj
                h = abs(di) * self.hx + abs(dj) * self.hy
                if 0 <= ni < self.n and 0 <= nj < self.n and self.inside[ni, nj]:
                    self.arm_nbr[k, d] = self.index[ni, nj]
                    self.arm_len[k, d] = h
                else:
                    t = self._cut_fraction(self.x[i], self.y[j],
                                           di * self.hx, dj * self.hy)
                    self.arm_len[k, d] = t * h
                    self.arm_cut[k, d] = (self.x[i] + t * di * self.hx,
                                          self.y[j] + t * dj * self.hy)
                    self.full_stencil[k] = False

    def is_symmetric(self) -> bool:
        """The (x, y) -> (x, -y) symmetry; true by construction here."""
        return bool(np.array_equal(self.inside, self.inside[:, ::-1]))

    def boundary_nodes(self):
        """All cut points where Dirichlet data is injected."""
        pts = self.arm_cut[self.arm_nbr < 0]
        return pts.reshape(-1, 2)


@dataclass
class BoundaryData:
    """Dirichlet data phi on the domain boundary, sampled from a callable."""

    func: Callable[[np.ndarray, np.ndarray], np.ndarray]

    def __call__(self, x, y):
        vals = np.asarray(self.func(np.asarray(x, dtype=float),
                                    np.asarray(y, dtype=float)), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise ValueError("boundary data must be finite")
        return vals


def _direction_ops(dom: ConvexDomain, phi: BoundaryData):
    """Sparse first/second difference operators on the unknown vector.

    Returns (Ax, bx, Axx, bxx, Ay, by, Ayy, byy) with A @ f + b the
    derivative values at the active nodes; b carries the injected boundary
    values.
    """
    N = dom.nodes.shape[0]
    ops = {}
    for axis, (dp, dm) in (("x", (0, 1)), ("y", (2, 3))):
        rows1, cols1, vals1 = [], [], []
        rows2, cols2, vals2 = [], [], []
        b1 = np.zeros(N)
        b2 = np.zeros(N)
        for k in range(N):
            hp = dom.arm_len[k, dp]
            hm = dom.arm_len[k, dm]
            np_idx = dom.arm_nbr[k, dp]
            nm_idx = dom.arm_nbr[k, dm]
            fp_val = None if np_idx >= 0 else float(phi(*dom.arm_cut[k, dp]))
            fm_val = None if nm_idx >= 0 else float(phi(*dom.arm_cut[k, dm]))
            # first derivative, second order on unequal arms
            cp = hm / (hp * (hp + hm))
            cm = -hp / (hm * (hp + hm))
            cc = (hp - hm) / (hp * hm)
            # second derivative (Shortley-Weller)
            dpp = 2.0 / (hp * (hp + hm))
            dmm = 2.0 / (hm * (hp + hm))
            dcc = -2.0 / (hp * hm)
            rows1.append(k); cols1.append(k); vals1.append(cc)
            rows2.append(k); cols2.append(k); vals2.append(dcc)
            if np_idx >= 0:
                rows1.append(k); cols1.append(np_idx); vals1.append(cp)
                rows2.append(k); cols2.append(np_idx); vals2.append(dpp)
            else:
                b1[k] += cp * fp_val
                b2[k] += dpp * fp_val
            if nm_idx >= 0:
                rows1.append(k); cols1.append(nm_idx); vals1.append(cm)
                rows2.append(k); cols2.append(nm_idx); vals2.append(dmm)
            else:
                b1[k] += cm * fm_val
                b2[k] += dmm * fm_val
        A1 = sp.csr_matrix((vals1, (rows1, cols1)), shape=(N, N))
        A2 = sp.csr_matrix((vals2, (rows2, cols2)), shape=(N, N))
        ops[axis] = (A1, b1, A2, b2)
    return ops["x"] + ops["y"]


@dataclass
class PotentialSolution:
    """A solved potential f with its derived pair (u, v) = (f_y, f_x)."""

    domain: ConvexDomain
    a: float
    f: GridField
    u: GridField
    v: GridField
    residual_P: float
    residual_CR: float
    newton_iters: int
    boundary: BoundaryData = field(repr=False)
    fvec: np.ndarray = field(repr=False, default=None)
    # for a = 0 solves: the smallest continuation level that converged;
    # residual_P is evaluated against the equation at this level
    continuation_a: float = None

    def grids(self):
        return self.f, self.u, self.v


def _coefficient(v, y, a, clamp=True):
    s = v * v + y * y + a * a
    if clamp:
        s = np.maximum(s, EPS_REG ** 2)
    return 1.0 / np.sqrt(s)


def p_operator(f: GridField, a: float, domain: ConvexDomain,
               phi: BoundaryData | None = None) -> GridField:
    """Evaluate P(f) at active nodes.  Boundary arms use phi when given,
    otherwise the stored (masked) grid values must cover a margin."""
    if phi is None:
        phi = BoundaryData(_grid_sampler(f))
    Ax, bx, Axx, bxx, _, _, Ayy, byy = _direction_ops(domain, phi)
    fv = f.values[domain.inside[: f.nx, : f.ny]] if f.mask is None else f.values[domain.inside]
    fv = np.asarray(fv, dtype=float)
    yv = domain.y[domain.nodes[:, 1]]
    v = Ax @ fv + bx
    res = _coefficient(v, yv, a) * (Axx @ fv + bxx) + 2.0 * (Ayy @ fv + byy)
    out = np.full((domain.n, domain.n), np.nan)
    out[domain.inside] = res
    return GridField(out, -domain.rx, -domain.ry, domain.hx, domain.hy,
                     mask=domain.inside.copy())


def _grid_sampler(f: GridField):
    def sample(x, y):
        i = np.clip(np.round((np.asarray(x) - f.x0) / f.hx).astype(int), 0, f.nx - 1)
        j = np.clip(np.round((np.asarray(y) - f.y0) / f.hy).astype(int), 0, f.ny - 1)
        return f.values[i, j]
    return sample


def solve_dirichlet(phi: BoundaryData, a: float, domain: ConvexDomain,
                    tol: float = 1e-10, max_newton: int = 40,
                    damping_min: float = 2.0 ** -20,
                    initial: np.ndarray | None = None) -> PotentialSolution:
    """Damped-Newton Dirichlet solve; continuation in a when a = 0.

    For a != 0 the equation is uniformly elliptic and Newton from the
    harmonic extension of phi converges; for a = 0 the solution is the
    continuation limit along a_k = 2^{-k}, stopped when successive
    iterates agree to tol in sup norm.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not domain.is_symmetric():
        warnings.warn("domain violates the (x, y) -> (x, -y) symmetry hypothesis",
                      HypothesisViolationWarning)
    if a == 0.0:
        return _solve_continuation(phi, domain, tol, max_newton, damping_min)

    ops = _direction_ops(domain, phi)
    fv, iters = _newton(ops, domain, a, tol, max_newton, damping_min, initial)
    return _package(phi, a, domain, ops, fv, iters, tol)


class ContinuationStalledWarning(UserWarning):
    """Continuation toward a = 0 stopped before the iterate tolerance."""


def _solve_continuation(phi, domain, tol, max_newton, damping_min, a0=1.0):
    ops = _direction_ops(domain, phi)
    fv = None
    prev = None
    iters = 0
    a_good = None
    for k in range(60):
        ak = a0 * 2.0 ** -k
        try:
            fv, it = _newton(ops, domain, ak, tol, max_newton, damping_min, fv)
        except NewtonDivergenceError as exc:
            if fv is None:
                raise
            warnings.warn("continuation stalled at a = %g (residual %.2e); "
                          "returning the last converged level" % (ak, exc.residual),
                          ContinuationStalledWarning)
            break
        iters += it
        a_good = ak
        if prev is not None and np.max(np.abs(fv - prev)) < tol:
            break
        prev = fv.copy()
    return _package(phi, 0.0, domain, ops, fv, iters, tol, a_eval=a_good)


def _newton(ops, domain, a, tol, max_newton, damping_min, initial=None):
    Ax, bx, Axx, bxx, _, _, Ayy, byy = ops
    yv = domain.y[domain.nodes[:, 1]]
    L = Axx + Ayy  # harmonic-extension operator for the initial guess

    if initial is None:
        fv = spla.spsolve(L.tocsc(), -(bxx + byy))
    else:
        fv = np.asarray(initial, dtype=float).copy()

    def residual(f):
        v = Ax @ f + bx
        return _coefficient(v, yv, a) * (Axx @ f + bxx) + 2.0 * (Ayy @ f + byy)

    res = residual(fv)
    rnorm = np.linalg.norm(res)
    for it in range(max_newton):
        if np.max(np.abs(res)) <= tol:
            return fv, it
        v = Ax @ fv + bx
        fxx = Axx @ fv + bxx
        c = _coefficient(v, yv, a)
        dc = -v * c ** 3
        J = sp.diags(c) @ Axx + 2.0 * Ayy + sp.diags(fxx * dc) @ Ax
        step = spla.spsolve(J.tocsc(), -res)
        lam = 1.0
        while lam >= damping_min:
            cand = fv + lam * step
            cres = residual(cand)
            cnorm = np.linalg.norm(cres)
            if cnorm < rnorm:
                fv, res, rnorm = cand, cres, cnorm
                break
            lam *= 0.5
        else:
            raise NewtonDivergenceError(
                "damping underflow at residual %.3e" % np.max(np.abs(res)),
                float(np.max(np.abs(res))))
    if np.max(np.abs(res)) <= tol:
        return fv, max_newton
    raise NewtonDivergenceError(
        "no convergence after %d iterations, residual %.3e"
        % (max_newton, np.max(np.abs(res))), float(np.max(np.abs(res))))


def _package(phi, a, domain, ops, fv, iters, tol, a_eval=None):
    Ax, bx, Axx, bxx, Ay, by, Ayy, byy = ops
    yv = domain.y[domain.nodes[:, 1]]
    v = Ax @ fv + bx
    u = Ay @ fv + by
    res = (_coefficient(v, yv, a if a_eval is None else a_eval)
           * (Axx @ fv + bxx) + 2.0 * (Ayy @ fv + byy))

    def to_field(vec):
        arr = np.full((domain.n, domain.n), np.nan)
        arr[domain.inside] = vec
        return GridField(arr, -domain.rx, -domain.ry, domain.hx, domain.hy,
                         mask=domain.inside.copy())

    sol = PotentialSolution(
        domain=domain, a=a, f=to_field(fv), u=to_field(u), v=to_field(v),
        residual_P=float(np.max(np.abs(res))), residual_CR=np.nan,
        newton_iters=iters, boundary=phi, fvec=fv,
        continuation_a=a_eval if a == 0.0 else None)
    sol.residual_CR = cr_residual(sol)
    return sol


# ---------------------------------------------------------------------------
# verification of the nonlinear Cauchy-Riemann system


def _deep_interior(domain: ConvexDomain, margin: int = 1) -> np.ndarray:
    """Nodes whose (2*margin+1)-stencil lies entirely inside the domain."""
    ok = domain.inside.copy()
    for _ in range(margin):
        grown = ok.copy()
        grown[1:, :] &= ok[:-1, :]
        grown[:-1, :] &= ok[1:, :]
        grown[:, 1:] &= ok[:, :-1]
        grown[:, :-1] &= ok[:, 1:]
        ok = grown
    return ok


def _central(field: np.ndarray, axis: int, h: float) -> np.ndarray:
    out = np.full_like(field, np.nan)
    if axis == 0:
        out[1:-1, :] = (field[2:, :] - field[:-2, :]) / (2.0 * h)
    else:
        out[:, 1:-1] = (field[:, 2:] - field[:, :-2]) / (2.0 * h)
    return out


def cr_residual(sol: PotentialSolution, grid_tol: float | None = None) -> float:
    """Max deep-interior residual of the nonlinear Cauchy-Riemann system.

    For a = 0 the nodes (x, 0) where v vanishes to grid tolerance are
    excluded (u, v need not be differentiable there).  The statistic uses
    a two-node interior margin: the first ring inside the cut boundary
    carries the boundary scheme's lower-order truncation, which would
    mask the second-order interior behavior.
    """
    dom = sol.domain
    deep = _deep_interior(dom, 2)
    uvals, vvals = sol.u.values, sol.v.values
    ux = _central(uvals, 0, dom.hx)
    uy = _central(uvals, 1, dom.hy)
    vx = _central(vvals, 0, dom.hx)
    vy = _central(vvals, 1, dom.hy)
    _, Y = sol.f.coords()
    root = np.sqrt(vvals ** 2 + Y ** 2 + sol.a ** 2)
    r1 = np.abs(ux - vy)
    r2 = np.abs(vx + 2.0 * root * uy)
    sel = deep & np.isfinite(r1) & np.isfinite(r2)
    if sol.a == 0.0:
        if grid_tol is None:
            grid_tol = max(10 * np.finfo(float).eps,
                           1e-3 * np.nanmax(np.abs(vvals)))
        axis = np.abs(Y) < 0.5 * dom.hy
        sel &= ~(axis & (np.abs(vvals) < grid_tol))
    if not np.any(sel):
        return 0.0
    return float(max(np.max(r1[sel]), np.max(r2[sel])))


def singular_points(sol: PotentialSolution):
    """Singular points (0, 0, x + i u(x, 0)) of the lifted 3-fold for a = 0."""
    if sol.a != 0.0:
        return []
    dom = sol.domain
    j0 = np.argmin(np.abs(dom.y))
    if abs(dom.y[j0]) > 1e-12 * max(dom.hy, 1.0):
        return []
    vrow = sol.v.values[:, j0]
    urow = sol.u.values[:, j0]
    vmax = np.nanmax(np.abs(sol.v.values))
    thresh = max(10 * np.finfo(float).eps, 1e-3 * (vmax if np.isfinite(vmax) else 0.0))
    idx = [i for i in range(dom.n)
           if dom.inside[i, j0] and np.isfinite(vrow[i])]
    # group consecutive below-threshold nodes; a run bracketed by a sign
    # change is one transversal zero (keep its best node), while a run
    # with no sign information is a genuine segment of zeros
    runs = []
    run = []
    for i in idx:
        if abs(vrow[i]) < thresh:
            if run and i != run[-1] + 1:
                runs.append(run)
                run = []
            run.append(i)
        elif run:
            runs.append(run)
            run = []
    if run:
        runs.append(run)
    out = []
    for run in runs:
        lo, hi = run[0] - 1, run[-1] + 1
        has_left = lo in idx and abs(vrow[lo]) >= thresh
        has_right = hi in idx and abs(vrow[hi]) >= thresh
        if has_left and has_right:
            best = min(run, key=lambda i: abs(vrow[i]))
            out.append((float(dom.x[best]),
                        complex(dom.x[best], urow[best])))
        else:
            out.extend((float(dom.x[i]), complex(dom.x[i], urow[i]))
                       for i in run)
    # transversal crossings that jump the threshold between two nodes
    small = {i for r in runs for i in r}
    for k in range(1, len(idx)):
        i0, i1 = idx[k - 1], idx[k]
        if (i1 == i0 + 1 and i0 not in small and i1 not in small
                and vrow[i0] * vrow[i1] < 0.0):
            best = i0 if abs(vrow[i0]) <= abs(vrow[i1]) else i1
            out.append((float(dom.x[best]),
                        complex(dom.x[best], urow[best])))
    out.sort(key=lambda t: t[0])
    return out


# ---------------------------------------------------------------------------
# zero counting for pairs of solutions


def winding_number(vectors: np.ndarray) -> int:
    """Winding of a closed polyline of 2D vectors around the origin."""
    ang = np.arctan2(vectors[:, 1], vectors[:, 0])
    d = np.diff(np.concatenate([ang, ang[:1]]))
    d = (d + np.pi) % (2.0 * np.pi) - np.pi
    return int(np.round(np.sum(d) / (2.0 * np.pi)))


@dataclass
class DifferenceZeroReport:
    zeros: list        # [((x, y), winding)]
    total: int         # count with multiplicity
    identical: bool = False


def difference_zeros(s1: PotentialSolution, s2: PotentialSolution,
                     identical_tol: float = 0.0) -> DifferenceZeroReport:
    """Isolated zeros of (u1 - u2, v1 - v2) in the open domain, with winding
    number as the multiplicity surrogate."""
    if s1.domain.n != s2.domain.n or s1.domain.rx != s2.domain.rx:
        raise ValueError("solutions live on different grids")
    du = s1.u.values - s2.u.values
    dv = s1.v.values - s2.v.values
    deep = _deep_interior(s1.domain, 1)
    sel = deep & np.isfinite(du) & np.isfinite(dv)
    if np.nanmax(np.abs(du[sel])) <= identical_tol and \
       np.nanmax(np.abs(dv[sel])) <= identical_tol:
        return DifferenceZeroReport([], 0, identical=True)
    dom = s1.domain
    zeros = []
    for i in range(dom.n - 1):
        for j in range(dom.n - 1):
            corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)]
            if not all(sel[c] for c in corners):
                continue
            vecs = np.array([[du[c], dv[c]] for c in corners])
            if np.min(np.hypot(vecs[:, 0], vecs[:, 1])) == 0.0:
                w = 1  # zero exactly on a corner: count it once
            else:
                w = winding_number(vecs)
            if w != 0:
                cx = dom.x[i] + 0.5 * dom.hx
                cy = dom.y[j] + 0.5 * dom.hy
                zeros.append(((float(cx), float(cy)), int(w)))
    return DifferenceZeroReport(zeros, int(sum(abs(w) for _, w in zeros)))


# ---------------------------------------------------------------------------
# lifting to special Lagrangian 3-folds in C^3


def _central4(field: np.ndarray, axis: int, h: float) -> np.ndarray:
    """Fourth-order central first derivative; NaN within two nodes of the
    array edge."""
    out = np.full_like(field, np.nan)
    if axis == 0:
        out[2:-2, :] = (-field[4:, :] + 8 * field[3:-1, :]
                        - 8 * field[1:-3, :] + field[:-4, :]) / (12.0 * h)
    else:
        out[:, 2:-2] = (-field[:, 4:] + 8 * field[:, 3:-1]
                        - 8 * field[:, 1:-3] + field[:, :-4]) / (12.0 * h)
    return out


@dataclass
class LiftedCloud:
    points: np.ndarray          # (N, 3) complex
    planes: list                # TangentPlane per point
    sl_defects: np.ndarray      # (N,)
    moment_values: np.ndarray   # |z1|^2 - |z2|^2 per point
    n_excluded: int = 0


def lift_to_sl3(sol: PotentialSolution, samples_per_node: int = 4) -> LiftedCloud:
    """Sample the lifted SL 3-fold with tangent planes from finite differences.

    All derivative fields are fourth-order central differences of the
    potential f on the uniform grid.  Because the stencils commute, the
    discrete identity du/dx = dv/dy holds exactly and the omega pullback
    of the lifted tangent planes vanishes to round-off; the Im Omega
    defect carries only the solver's truncation error.  Near the singular
    set of an a = 0 solution (v = y = 0) points are flagged and excluded
    from the defect statistics.
    """
    dom = sol.domain
    a = sol.a
    F = sol.f.values
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        u = _central4(F, 1, dom.hy)
        v = _central4(F, 0, dom.hx)
        ux = _central4(u, 0, dom.hx)
        uy = _central4(u, 1, dom.hy)
        vx = _central4(v, 0, dom.hx)
        vy = _central4(v, 1, dom.hy)
    valid = _deep_interior(dom, 4)
    X, Y = sol.f.coords()
    pkg = standard_cy_package(3)

    pts, planes, defects, moments = [], [], [], []
    excluded = 0
    thetas = 2.0 * np.pi * np.arange(samples_per_node) / samples_per_node
    for i in range(dom.n):
        for j in range(dom.n):
            if not (valid[i, j] and np.isfinite(ux[i, j]) and np.isfinite(vx[i, j])):
                continue
            x, y = X[i, j], Y[i, j]
            w = v[i, j] + 1j * y
            q = np.sqrt(a * a + abs(w) ** 2)
            s = a + q
            if s < 1e-14:
                excluded += 1
                continue
            R = np.sqrt(s)
            near_singular = (a == 0.0 and abs(w) < 1e-8)
            qx = (v[i, j] * vx[i, j]) / q if q > 0 else 0.0
            qy = (v[i, j] * vy[i, j] + y) / q if q > 0 else 0.0
            Rx = qx / (2.0 * R)
            Ry = qy / (2.0 * R)
            for th in thetas:
                e = np.exp(1j * th)
                z1 = R * e
                z2 = w / z1
                z3 = x + 1j * u[i, j]
                p = np.array([z1, z2, z3])
                z1x = Rx * e
                z1y = Ry * e
                t_x = np.array([z1x, (vx[i, j] * z1 - w * z1x) / z1 ** 2,
                                1.0 + 1j * ux[i, j]])
                t_y = np.array([z1y, ((vy[i, j] + 1j) * z1 - w * z1y) / z1 ** 2,
                                1j * uy[i, j]])
                t_th = np.array([1j * z1, -1j * z2, 0.0])
                basis = np.array([_c2r(t_x), _c2r(t_y), _c2r(t_th)])
                plane = TangentPlane(3, basis)
                pts.append(p)
                planes.append(plane)
                moments.append(abs(z1) ** 2 - abs(z2) ** 2)
                if near_singular:
                    defects.append(np.nan)
                    excluded += 1
                else:
                    defects.append(sl_defect(plane, pkg))
    return LiftedCloud(np.array(pts), planes, np.array(defects),
                       np.array(moments), excluded)


def _c2r(z: np.ndarray) -> np.ndarray:
    out = np.empty(2 * z.shape[0])
    out[0::2] = z.real
    out[1::2] = z.imag
    return out
