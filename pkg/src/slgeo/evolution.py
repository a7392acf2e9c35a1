"""Evolution of surfaces in C^3 sweeping special Lagrangian 3-folds.

The node velocity is the vector field obtained by contracting the
pushed-forward area bivector chi of the surface with Re Omega and raising
the resulting covector with the flat metric.  In complex coordinates this
is velocity = conj(T1 x T2) where T1, T2 are the pushed-forward tangent
vectors and x is the bilinear coordinate cross product.

The flow preserves the vanishing of the symplectic pullback, and for a
round sphere scaled by a unit complex number w it reduces to the scalar
equation dw/dt = conj(w)^2, whose orbits are the SO(3)-invariant family
r^3 sin(3 theta) = const.

Discretization: icosphere mesh; per-node pushforward weights are fixed
linear combinations of neighbor positions that reproduce two orthonormal
reference tangents exactly (so they are exact for ambient-linear maps);
explicit RK4 in time with drift-based step rejection.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp


class InvalidChiError(ValueError):
    """The area bivector vanishes at some node."""


class StepRejectedError(RuntimeError):
    """A step exceeded the symplectic-drift budget even at minimum dt."""


class NoMatchError(RuntimeError):
    """The evolved surface could not be fitted to the closed-form family."""


def icosphere(subdivisions: int = 3):
    """Triangulated unit sphere: icosahedron with subdivided, reprojected
    faces.  Returns (vertices (N, 3), triangles (T, 3)); N = 642 at
    subdivisions = 3."""
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    verts = np.array([
        [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
        [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
        [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
    ], dtype=float)
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    faces = np.array([
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ])
    for _ in range(subdivisions):
        vlist = list(verts)
        midpoint = {}

        def mid(a, b):
            key = (min(a, b), max(a, b))
            if key not in midpoint:
                p = vlist[a] + vlist[b]
                vlist.append(p / np.linalg.norm(p))
                midpoint[key] = len(vlist) - 1
            return midpoint[key]

        new_faces = []
        for a, b, c in faces:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            new_faces += [[a, ab, ca], [ab, b, bc], [ca, bc, c],
                          [ab, bc, ca]]
        verts = np.array(vlist)
        faces = np.array(new_faces)
    return verts, faces


def _vertex_neighbors(n_verts, faces):
    nbrs = [set() for _ in range(n_verts)]
    for a, b, c in faces:
        nbrs[a].update((b, c))
        nbrs[b].update((a, c))
        nbrs[c].update((a, b))
    return [sorted(s) for s in nbrs]


def _pushforward_matrices(verts, faces):
    """Sparse operators D1, D2 with (D @ positions) the pushforwards of two
    orthonormal reference tangents t1, t2 at each node (t1 x t2 outward).

    Coefficients are the minimum-norm exact solution of
    sum_j c_j (x_j - x_i) = t, so they reproduce d(phi)(t) exactly
    whenever phi is affine on the ambient space.
    """
    n = len(verts)
    nbrs = _vertex_neighbors(n, faces)
    rows1, cols1, vals1 = [], [], []
    rows2, cols2, vals2 = [], [], []
    for i in range(n):
        nv = verts[i]
        t1 = np.cross(nv, [0.0, 0.0, 1.0])
        if np.linalg.norm(t1) < 1e-8:
            t1 = np.cross(nv, [1.0, 0.0, 0.0])
        t1 /= np.linalg.norm(t1)
        t2 = np.cross(nv, t1)
        A = (verts[nbrs[i]] - nv).T                     # 3 x k
        AAT = A @ A.T
        for t, rows, cols, vals in ((t1, rows1, cols1, vals1),
                                    (t2, rows2, cols2, vals2)):
            c = A.T @ np.linalg.solve(AAT, t)
            rows.extend([i] * len(nbrs[i]) + [i])
            cols.extend(list(nbrs[i]) + [i])
            vals.extend(list(c) + [-float(np.sum(c))])
    D1 = sp.csr_matrix((vals1, (rows1, cols1)), shape=(n, n))
    D2 = sp.csr_matrix((vals2, (rows2, cols2)), shape=(n, n))
    return D1, D2


@dataclass
class EvolvingSurface:
    """A triangulated surface evolving in C^3.

    states holds complex (N, 3) node-position snapshots; chi is the unit
    area bivector encoded by the two pushforward operators.
    """

    verts: np.ndarray
    faces: np.ndarray
    D1: sp.csr_matrix = field(repr=False)
    D2: sp.csr_matrix = field(repr=False)
    states: list = field(default_factory=list)
    times: list = field(default_factory=list)
    dt: float = 0.01
    drift_budget: float = 1e-6

    @classmethod
    def sphere(cls, subdivisions: int = 3, scale: complex = 1.0,
               dt: float = 0.01) -> "EvolvingSurface":
        verts, faces = icosphere(subdivisions)
        D1, D2 = _pushforward_matrices(verts, faces)
        surf = cls(verts, faces, D1, D2, dt=dt)
        surf.states.append(scale * verts.astype(complex))
        surf.times.append(0.0)
        surf._check_chi(surf.states[0])
        return surf

    def _check_chi(self, state):
        c = np.cross(self.D1 @ state, self.D2 @ state)
        if np.min(np.linalg.norm(c, axis=1)) < 1e-12:
            raise InvalidChiError("area bivector vanishes at a node")

    def velocity(self, state: np.ndarray) -> np.ndarray:
        """conj(T1 x T2) rowwise; the contraction of the pushed-forward
        bivector with Re Omega, metric-raised."""
        return np.conj(np.cross(self.D1 @ state, self.D2 @ state))


def _rk4(surf: EvolvingSurface, state: np.ndarray, dt: float) -> np.ndarray:
    k1 = surf.velocity(state)
    k2 = surf.velocity(state + 0.5 * dt * k1)
    k3 = surf.velocity(state + 0.5 * dt * k2)
    k4 = surf.velocity(state + dt * k3)
    return state + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def state_drift(surf: EvolvingSurface, state: np.ndarray) -> float:
    """Max discrete symplectic pullback over mesh triangles."""
    p0 = state[surf.faces[:, 0]]
    e1 = state[surf.faces[:, 1]] - p0
    e2 = state[surf.faces[:, 2]] - p0
    om = np.imag(np.sum(np.conj(e1) * e2, axis=1))
    return float(np.max(np.abs(om)))


def evolve_step(surf: EvolvingSurface) -> EvolvingSurface:
    """One accepted RK4 step; halves dt while the drift budget is exceeded."""
    state = surf.states[-1]
    base = state_drift(surf, state)
    dt = surf.dt
    while True:
        cand = _rk4(surf, state, dt)
        if state_drift(surf, cand) <= max(base, 0.0) + surf.drift_budget:
            break
        dt *= 0.5
        if dt < 1e-12:
            raise StepRejectedError("drift budget unattainable at dt = %g" % dt)
    surf.states.append(cand)
    surf.times.append(surf.times[-1] + dt)
    surf.dt = dt
    return surf


def evolve_run(surf: EvolvingSurface, t_end: float) -> EvolvingSurface:
    while surf.times[-1] < t_end - 1e-12:
        surf.dt = min(surf.dt, t_end - surf.times[-1])
        evolve_step(surf)
    return surf


def symplectic_drift(surf: EvolvingSurface) -> float:
    """Max discrete pullback of omega over all cells and recorded times."""
    return max(state_drift(surf, s) for s in surf.states)


def swept_sl_defect(surf: EvolvingSurface, stride: int = 50) -> float:
    """Max SL defect of 3-planes (surface tangents, velocity) over a node
    subsample of all states; the swept 3-fold is SL when this vanishes."""
    from .core import TangentPlane, sl_defect, standard_cy_package
    pkg = standard_cy_package(3)
    worst = 0.0
    for state in surf.states:
        T1 = surf.D1 @ state
        T2 = surf.D2 @ state
        V = surf.velocity(state)
        for i in range(0, state.shape[0], stride):
            basis = np.empty((3, 6))
            for r, vec in enumerate((T1[i], T2[i], V[i])):
                basis[r, 0::2] = vec.real
                basis[r, 1::2] = vec.imag
            worst = max(worst, sl_defect(TangentPlane(3, basis), pkg))
    return worst


# ---------------------------------------------------------------------------
# comparison against the SO(3)-invariant closed-form family


def sphere_scale(state: np.ndarray) -> np.ndarray:
    """Per-node complex scale w with state = w * (real unit vectors);
    recovered from the bilinear square sum, principal branch."""
    w2 = np.sum(state * state, axis=1)
    return np.sqrt(w2)


def compare_so3(surf: EvolvingSurface, probe_indices=None) -> float:
    """Max relative radial deviation of probe states from the family
    r^3 sin(3 theta) = const, with the constant fitted per run."""
    if probe_indices is None:
        probe_indices = range(len(surf.states))
    probe_indices = list(probe_indices)
    if any(idx < 0 or idx >= len(surf.states) for idx in probe_indices):
        raise NoMatchError("probe index outside the recorded states")
    worst = 0.0
    consts = []
    for idx in probe_indices:
        w = sphere_scale(surf.states[idx])
        r = np.abs(w)
        th = np.angle(w)
        if np.any(r < 1e-12) or np.any(th <= 0) or np.any(th >= np.pi / 3):
            raise NoMatchError("state %d left the family parameter range" % idx)
        consts.append(r ** 3 * np.sin(3 * th))
    t3 = float(np.mean(np.concatenate([c.ravel() for c in consts])))
    if t3 <= 0:
        raise NoMatchError("fitted family constant is nonpositive")
    for idx in probe_indices:
        w = sphere_scale(surf.states[idx])
        r = np.abs(w)
        th = np.angle(w)
        r_model = t3 ** (1.0 / 3.0) * np.sin(3 * th) ** (-1.0 / 3.0)
        worst = max(worst, float(np.max(np.abs(r - r_model) / r_model)))
    return worst
