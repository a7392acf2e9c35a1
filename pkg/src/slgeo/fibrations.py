"""Special Lagrangian fibrations of subsets of C^3.

Three constructions:

  * families of U(1)-invariant Dirichlet problems Phi(a, b, c) =
    phi + b x + c y over a convex domain, whose solved potentials lift to
    pairwise-disjoint SL 3-folds N_alpha;
  * the explicit piecewise-smooth fibration F(z) = (a, b) with
    2a = |z1|^2 - |z2|^2 and a three-branch formula for b, whose fibers
    are T^2-cones at a = 0 and S^1 x R^2 otherwise;
  * the T^2-cone fibration (|z1|^2-|z3|^2, |z2|^2-|z3|^2, Im(z1 z2 z3)),
    sampled in closed form along its U(1)^2 orbits.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import TangentPlane, real_coords, sl_defect, standard_cy_package
from .u1 import (BoundaryData, ConvexDomain, PotentialSolution, difference_zeros,
                 lift_to_sl3, singular_points, solve_dirichlet)

RANK_RTOL = 1e-8  # singular-value ratio below which the Jacobian drops rank


class InvalidFamilyError(ValueError):
    """A parameter pair violates the one-max-one-min boundary condition."""


class InvalidRegionError(ValueError):
    """The parameter region U is empty along some axis."""


class EmptyFiberError(ValueError):
    """The requested level set contains no points."""


@dataclass
class FiberRecord:
    alpha: tuple
    points: np.ndarray                  # (N, 3) complex
    topology: str                       # T2_cone | S1xR2 | plane_pair | T3_like | other
    singular_points: list
    sl_residual_max: float


@dataclass
class FibrationFamily:
    """Dirichlet-problem family Phi(a, b, c) = base_phi + b x + c y.

    U is ((a_min, a_max), (b_min, b_max), (c_min, c_max)).  Solutions are
    cached per alpha; the one-max-one-min condition for same-a parameter
    pairs is asserted numerically on construction.
    """

    base_phi: BoundaryData
    U: tuple
    domain: ConvexDomain
    tol: float = 1e-10
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for lo, hi in self.U:
            if hi < lo:
                raise InvalidRegionError("empty parameter range (%g, %g)" % (lo, hi))
        self._assert_max_min_condition()

    def _assert_max_min_condition(self, n_pairs: int = 12, seed: int = 0):
        rng = np.random.default_rng(seed)
        (b0, b1), (c0, c1) = self.U[1], self.U[2]
        theta = np.linspace(0.0, 2 * np.pi, 720, endpoint=False)
        bx = self.domain.rx * np.cos(theta)
        by = self.domain.ry * np.sin(theta)
        for _ in range(n_pairs):
            db = rng.uniform(b0, b1) - rng.uniform(b0, b1)
            dc = rng.uniform(c0, c1) - rng.uniform(c0, c1)
            if db == 0.0 and dc == 0.0:
                continue
            delta = db * bx + dc * by
            n_max = int(np.sum((delta > np.roll(delta, 1))
                               & (delta > np.roll(delta, -1))))
            n_min = int(np.sum((delta < np.roll(delta, 1))
                               & (delta < np.roll(delta, -1))))
            if n_max != 1 or n_min != 1:
                raise InvalidFamilyError(
                    "boundary difference for (db, dc) = (%g, %g) has %d maxima "
                    "and %d minima" % (db, dc, n_max, n_min))

    def boundary_data(self, alpha) -> BoundaryData:
        a, b, c = alpha
        base = self.base_phi
        return BoundaryData(lambda x, y: base(x, y) + b * np.asarray(x)
                            + c * np.asarray(y))

    def solution(self, alpha) -> PotentialSolution:
        key = tuple(float(v) for v in alpha)
        if key not in self._cache:
            self._cache[key] = solve_dirichlet(
                self.boundary_data(key), key[0], self.domain, tol=self.tol)
        return self._cache[key]

    def fiber(self, alpha, samples_per_node: int = 2) -> FiberRecord:
        sol = self.solution(alpha)
        cloud = lift_to_sl3(sol, samples_per_node)
        sing = singular_points(sol)
        if alpha[0] != 0.0:
            topo = "S1xR2"
        elif len(sing) == 1:
            topo = "T2_cone"
        else:
            topo = "other" if sing else "S1xR2"
        finite = cloud.sl_defects[np.isfinite(cloud.sl_defects)]
        res = float(np.max(finite)) if finite.size else 0.0
        return FiberRecord(tuple(alpha), cloud.points, topo,
                           [(0.0, 0.0, z3) for _, z3 in sing], res)


def check_disjoint(fam: FibrationFamily, alpha_pairs, samples: int = 200,
                   seed: int = 0):
    """Disjointness report for parameter pairs.

    Same-a pairs must have zero difference zeros of (u, v); different-a
    pairs are separated by the moment-map level |z1|^2 - |z2|^2 = 2a.
    """
    rng = np.random.default_rng(seed)
    report = []
    for alpha, alpha2 in alpha_pairs:
        entry = {"alpha": tuple(alpha), "alpha2": tuple(alpha2)}
        if alpha[0] == alpha2[0]:
            s1 = fam.solution(alpha)
            s2 = fam.solution(alpha2)
            rep = difference_zeros(s1, s2)
            entry["mechanism"] = "difference-zeros"
            entry["zeros"] = rep.total
            entry["identical"] = rep.identical
            entry["disjoint"] = (rep.total == 0) and not rep.identical
        else:
            c1 = fam.fiber(alpha)
            c2 = fam.fiber(alpha2)
            lvl1 = 0.5 * np.array([abs(p[0]) ** 2 - abs(p[1]) ** 2
                                   for p in c1.points])
            lvl2 = 0.5 * np.array([abs(p[0]) ** 2 - abs(p[1]) ** 2
                                   for p in c2.points])
            entry["mechanism"] = "moment-level"
            entry["level_error"] = float(max(np.max(np.abs(lvl1 - alpha[0])),
                                             np.max(np.abs(lvl2 - alpha2[0]))))
            entry["disjoint"] = bool(
                abs(alpha[0] - alpha2[0]) > 2.0 * entry["level_error"])
            idx1 = rng.choice(len(c1.points), min(samples, len(c1.points)),
                              replace=False)
            idx2 = rng.choice(len(c2.points), min(samples, len(c2.points)),
                              replace=False)
            p1 = np.array([np.concatenate([p.real, p.imag])
                           for p in c1.points[idx1]])
            p2 = np.array([np.concatenate([p.real, p.imag])
                           for p in c2.points[idx2]])
            d = np.linalg.norm(p1[:, None, :] - p2[None, :, :], axis=-1)
            entry["min_distance"] = float(np.min(d))
        report.append(entry)
    return report


# ---------------------------------------------------------------------------
# the explicit piecewise-smooth fibration of C^3


def explicit_F(p) -> tuple:
    """(a, b) with 2a = |z1|^2 - |z2|^2 and the three-branch b formula."""
    z1, z2, z3 = (complex(v) for v in p)
    a = 0.5 * (abs(z1) ** 2 - abs(z2) ** 2)
    if a == 0.0 and z1 == 0 and z2 == 0:
        b = z3
    elif a >= 0.0 and z1 != 0:
        b = z3 + np.conj(z1) * np.conj(z2) / abs(z1)
    else:
        b = z3 + np.conj(z1) * np.conj(z2) / abs(z2)
    return float(a), complex(b)


def explicit_F_fiber(a: float, b: complex, n_r: int = 12, n_phase: int = 8,
                     r_max: float = 2.0) -> FiberRecord:
    """Sampled fiber of the explicit fibration.

    Points are z1 = r1 e^{i t1}, z2 = r2 e^{i t2} with
    r1^2 - r2^2 = 2a, and z3 = b - min(r1, r2) e^{-i(t1 + t2)}.
    """
    b = complex(b)
    smin = np.sqrt(max(0.0, -2.0 * a))
    pts = []
    planes = []
    pkg = standard_cy_package(3)
    for s in np.linspace(smin, np.sqrt(smin ** 2 + r_max ** 2), n_r):
        r2 = s
        r1 = np.sqrt(max(r2 ** 2 + 2.0 * a, 0.0))
        rmin = min(r1, r2)
        if r1 < 1e-13 and r2 < 1e-13:
            pts.append(np.array([0.0, 0.0, b]))
            planes.append(None)
            continue
        for t1 in 2 * np.pi * np.arange(n_phase) / n_phase:
            for t2 in 2 * np.pi * np.arange(n_phase) / n_phase:
                e1, e2 = np.exp(1j * t1), np.exp(1j * t2)
                e3 = np.exp(-1j * (t1 + t2))
                z = np.array([r1 * e1, r2 * e2, b - rmin * e3])
                pts.append(z)
                if rmin < 1e-6:
                    # chart degeneracy where one circle collapses; the
                    # (s, t1, t2) coordinates are singular but the fiber
                    # is smooth there for a != 0
                    planes.append(None)
                    continue
                # analytic tangent in (s, t1, t2); r1 dr1 = r2 dr2
                dr2 = 1.0
                dr1 = r2 / r1 * dr2 if r1 > 1e-13 else 0.0
                drmin = dr1 if r1 <= r2 else dr2
                t_s = np.array([dr1 * e1, dr2 * e2, -drmin * e3])
                t_1 = np.array([1j * r1 * e1, 0.0, 1j * rmin * e3])
                t_2 = np.array([0.0, 1j * r2 * e2, 1j * rmin * e3])
                planes.append(TangentPlane(3, real_coords(
                    np.array([t_s, t_1, t_2]))))
    defects = [sl_defect(pl, pkg) for pl in planes if pl is not None]
    sing = [(0.0, 0.0, b)] if a == 0.0 else []
    topo = "T2_cone" if a == 0.0 else "S1xR2"
    return FiberRecord((a, b.real, b.imag), np.array(pts), topo, sing,
                       float(np.max(defects)) if defects else 0.0)


def explicit_F_smoothness_jump(b: complex = 0.0, r: float = 1.0,
                               h: float = 1e-6) -> float:
    """One-sided derivative mismatch of the explicit fibration across the
    wall |z1| = |z2|, witnessing piecewise (not global) smoothness."""
    b = complex(b)
    t1 = 0.7
    z1 = r * np.exp(1j * t1)
    z2 = r + 0.0j
    z3 = b - r * np.exp(-1j * t1)
    def F_at(eps):
        return np.array(explicit_F((z1 * (1 + eps), z2, z3))[1])
    d_plus = (F_at(h) - F_at(0.0)) / h
    d_minus = (F_at(0.0) - F_at(-h)) / h
    return float(abs(d_plus - d_minus))


# ---------------------------------------------------------------------------
# the T^2-cone fibration of C^3


def harvey_lawson_F(p) -> tuple:
    z1, z2, z3 = (complex(v) for v in p)
    return (abs(z1) ** 2 - abs(z3) ** 2,
            abs(z2) ** 2 - abs(z3) ** 2,
            float(np.imag(z1 * z2 * z3)))


def harvey_lawson_jacobian(p) -> np.ndarray:
    """Real 3 x 6 Jacobian of the T^2-cone fibration at p."""
    z1, z2, z3 = (complex(v) for v in p)
    J = np.zeros((3, 6))
    J[0, 0:2] = 2 * np.array([z1.real, z1.imag])
    J[0, 4:6] = -2 * np.array([z3.real, z3.imag])
    J[1, 2:4] = 2 * np.array([z2.real, z2.imag])
    J[1, 4:6] = -2 * np.array([z3.real, z3.imag])
    # d Im(z1 z2 z3) = Im(dz1 z2 z3 + z1 dz2 z3 + z1 z2 dz3)
    for k, w in enumerate((z2 * z3, z1 * z3, z1 * z2)):
        J[2, 2 * k] = w.imag
        J[2, 2 * k + 1] = w.real
    return J


def jacobian_rank(J: np.ndarray) -> int:
    s = np.linalg.svd(J, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > RANK_RTOL * s[0]))


def classify_fiber_hl(a: float, b: float, c: float, n_rho: int = 10,
                      n_phase: int = 8, rho_max: float = 2.0) -> FiberRecord:
    """Sample the level set of the T^2-cone fibration along U(1)^2 orbits.

    Radii follow from rho = |z3| in closed form; the total phase is fixed
    by the Im(z1 z2 z3) = c equation.
    """
    rho_min = np.sqrt(max(0.0, -a, -b))
    pts = []
    sing = []
    defects = []
    pkg = standard_cy_package(3)
    if a == 0.0 and b == 0.0 and c == 0.0:
        pts.append(np.zeros(3, dtype=complex))
        sing.append((0.0, 0.0, 0.0))
    for rho in np.linspace(rho_min, np.sqrt(rho_min ** 2 + rho_max ** 2),
                           n_rho):
        r1 = np.sqrt(a + rho ** 2)
        r2 = np.sqrt(b + rho ** 2)
        prod = r1 * r2 * rho
        if prod == 0.0 or prod < abs(c):
            continue
        sigma = np.arcsin(np.clip(c / prod, -1.0, 1.0))
        for t1 in 2 * np.pi * np.arange(n_phase) / n_phase:
            for t2 in 2 * np.pi * np.arange(n_phase) / n_phase:
                t3 = sigma - t1 - t2
                z = np.array([r1 * np.exp(1j * t1), r2 * np.exp(1j * t2),
                              rho * np.exp(1j * t3)])
                pts.append(z)
                J = harvey_lawson_jacobian(z)
                if jacobian_rank(J) < 3:
                    sing.append(tuple(z))
                    continue
                plane = TangentPlane(3, _nullspace(J))
                defects.append(sl_defect(plane, pkg))
    if not pts:
        raise EmptyFiberError("no points on the (%.3g, %.3g, %.3g) level"
                              % (a, b, c))
    topo = "T2_cone" if sing else "T3_like"
    return FiberRecord((a, b, c), np.array(pts), topo, sing,
                       float(np.max(defects)) if defects else 0.0)


def _nullspace(J: np.ndarray) -> np.ndarray:
    """Orthonormal basis of Ker J as rows (m = 3 tangent vectors in R^6)."""
    _, _, vt = np.linalg.svd(J)
    return vt[3:, :]


def discriminant_scan(a_values, fam: FibrationFamily | None = None,
                      b: complex = 0.0, c: float = 0.0):
    """Parameters whose fiber contains singular points.

    With a family, each a is solved (at the given b, c) and its lifted
    singular set inspected; without one, the explicit fibration is used.
    The result is codimension 1 in the base: exactly the a = 0 slice for
    the explicit map.
    """
    singular = []
    for a in a_values:
        if fam is None:
            rec = explicit_F_fiber(float(a), b)
        else:
            rec = fam.fiber((float(a), complex(b).real, float(c)))
        if rec.singular_points:
            singular.append(float(a))
    return singular
