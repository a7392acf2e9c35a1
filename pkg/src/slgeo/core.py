"""Flat Calabi-Yau structure on C^m and pointwise calibration tests.

Real coordinates (x_1, ..., x_{2m}) on R^{2m} are paired into complex
coordinates z_j = x_{2j-1} + i x_{2j}.  The standard structure is

    g     = sum |dz_j|^2,
    omega = (i/2) sum dz_j ^ dzbar_j,
    Omega = dz_1 ^ ... ^ dz_m,

normalized so that omega^m / m! = (-1)^{m(m-1)/2} (i/2)^m Omega ^ Omegabar.
An oriented m-plane V is special Lagrangian iff omega|_V = 0 and
Im Omega|_V = 0 (for the orientation with Re Omega|_V >= 0).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm


class InvalidDimensionError(ValueError):
    """Complex dimension m is out of the supported range."""


class DegeneratePlaneError(ValueError):
    """Plane basis is (numerically) linearly dependent."""


class InvalidActionError(ValueError):
    """A generator does not preserve the Kahler form."""


def complex_coords(v: np.ndarray) -> np.ndarray:
    """Map real vectors (..., 2m) to complex vectors (..., m)."""
    v = np.asarray(v, dtype=float)
    return v[..., 0::2] + 1j * v[..., 1::2]


def real_coords(z: np.ndarray) -> np.ndarray:
    """Inverse of :func:`complex_coords`."""
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape[:-1] + (2 * z.shape[-1],))
    out[..., 0::2] = z.real
    out[..., 1::2] = z.imag
    return out


def standard_J(m: int) -> np.ndarray:
    """Complex-structure matrix J on R^{2m} (rotation by i in each z_j plane)."""
    J = np.zeros((2 * m, 2 * m))
    for j in range(m):
        J[2 * j, 2 * j + 1] = -1.0
        J[2 * j + 1, 2 * j] = 1.0
    return J


def _wedge_dense(covectors: np.ndarray) -> np.ndarray:
    """Full antisymmetrization of k complex covectors on R^n -> dense k-form."""
    k, n = covectors.shape
    form = np.zeros((n,) * k, dtype=complex)
    for idx in itertools.permutations(range(n), k):
        val = 0.0
        for perm in itertools.permutations(range(k)):
            sign = _perm_sign(perm)
            term = 1.0
            for a, p in enumerate(perm):
                term *= covectors[p, idx[a]]
            val += sign * term
        form[idx] = val
    return form


def _perm_sign(perm) -> int:
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


@dataclass(frozen=True)
class CYPackage:
    """The standard flat Calabi-Yau package (g, omega, Omega) on C^m.

    metric and kahler_form are dense 2m x 2m real matrices; re_omega and
    im_omega are the dense real m-form coefficient arrays of Re Omega and
    Im Omega.  All pairings used by the solvers go through the cheap
    complex-determinant route; the dense arrays are kept for invariant
    checks and generic contraction.
    """

    m: int
    metric: np.ndarray = field(repr=False)
    kahler_form: np.ndarray = field(repr=False)
    re_omega: np.ndarray = field(repr=False)
    im_omega: np.ndarray = field(repr=False)

    def omega(self, v: np.ndarray, w: np.ndarray) -> float:
        """Pair the Kahler form against two real vectors."""
        return float(np.asarray(v) @ self.kahler_form @ np.asarray(w))

    def holomorphic_volume(self, vectors: np.ndarray) -> complex:
        """Omega(v_1, ..., v_m) as the complex determinant of coordinates."""
        vectors = np.asarray(vectors, dtype=float)
        if vectors.shape != (self.m, 2 * self.m):
            raise ValueError("expected %d vectors in R^%d" % (self.m, 2 * self.m))
        return complex(np.linalg.det(complex_coords(vectors).T))


def standard_cy_package(m: int) -> CYPackage:
    """Build the flat structure on C^m.  Raises for m < 1."""
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise InvalidDimensionError("complex dimension must be an integer >= 1, got %r" % (m,))
    m = int(m)
    W = np.zeros((2 * m, 2 * m))
    for j in range(m):
        W[2 * j, 2 * j + 1] = 1.0
        W[2 * j + 1, 2 * j] = -1.0
    # dz_j as complex covectors on R^{2m}
    dz = np.zeros((m, 2 * m), dtype=complex)
    for j in range(m):
        dz[j, 2 * j] = 1.0
        dz[j, 2 * j + 1] = 1j
    omega_form = _wedge_dense(dz)
    return CYPackage(
        m=m,
        metric=np.eye(2 * m),
        kahler_form=W,
        re_omega=omega_form.real.copy(),
        im_omega=omega_form.imag.copy(),
    )


def normalization_residual(pkg: CYPackage) -> float:
    """Residual of omega^m/m! = (-1)^{m(m-1)/2} (i/2)^m Omega^Omegabar.

    Both sides are evaluated on the standard basis 2m-vector
    (e_1, ..., e_{2m}); the left side is a Pfaffian over perfect matchings,
    the right a signed sum over m-subsets.
    """
    m = pkg.m
    basis = np.eye(2 * m)
    lhs = _pfaffian(np.array([[pkg.omega(basis[i], basis[j]) for j in range(2 * m)]
                              for i in range(2 * m)]))
    rhs = 0.0 + 0.0j
    for subset in itertools.combinations(range(2 * m), m):
        comp = tuple(i for i in range(2 * m) if i not in subset)
        sign = _perm_sign(subset + comp)
        rhs += sign * pkg.holomorphic_volume(basis[list(subset)]) * \
            np.conj(pkg.holomorphic_volume(basis[list(comp)]))
    rhs *= (-1) ** (m * (m - 1) // 2) * (1j / 2) ** m
    return abs(lhs - rhs)


def _pfaffian(A: np.ndarray) -> float:
    """Pfaffian of a small antisymmetric matrix by matching expansion."""
    n = A.shape[0]
    if n % 2:
        return 0.0
    if n == 0:
        return 1.0
    total = 0.0
    # expand along row 0
    for j in range(1, n):
        if A[0, j] == 0.0:
            continue
        rest = [k for k in range(1, n) if k != j]
        sub = A[np.ix_(rest, rest)]
        total += (-1) ** (j - 1) * A[0, j] * _pfaffian(sub)
    return total


@dataclass
class TangentPlane:
    """An oriented real m-plane in R^{2m}, spanned by the rows of `basis`."""

    m: int
    basis: np.ndarray
    orientation: int = 1

    def __post_init__(self):
        self.basis = np.asarray(self.basis, dtype=float)
        if self.basis.shape != (self.m, 2 * self.m):
            raise ValueError("basis must be m vectors in R^{2m}")
        if self.orientation not in (+1, -1):
            raise ValueError("orientation must be +1 or -1")

    def volume(self) -> float:
        """m-volume of the basis parallelepiped (Gram determinant)."""
        gram = self.basis @ self.basis.T
        det = np.linalg.det(gram)
        if det <= 0.0:
            raise DegeneratePlaneError("plane basis is degenerate")
        return float(np.sqrt(det))

    def orthonormal_basis(self) -> np.ndarray:
        """Oriented orthonormal frame spanning the same plane."""
        q, r = np.linalg.qr(self.basis.T)
        diag = np.diag(r)
        if np.min(np.abs(diag)) < 1e-13 * max(1.0, np.max(np.abs(self.basis))):
            raise DegeneratePlaneError("plane basis is degenerate")
        q = q * np.sign(diag)  # R has positive diagonal -> frame keeps orientation
        frame = q.T
        if self.orientation < 0:
            frame = frame.copy()
            frame[-1] *= -1.0
        return frame

    def flipped(self) -> "TangentPlane":
        return TangentPlane(self.m, self.basis, -self.orientation)


def restrict_forms(plane: TangentPlane, pkg: CYPackage):
    """Restrict omega, Im Omega, Re Omega to the plane, as multiples of vol_V.

    For m = 2 the omega value is the literal ratio omega|_V / vol_V; for
    m > 2 (where omega|_V is not a top form on V) it is the maximum
    absolute omega-pairing over the coordinate 2-vectors of an oriented
    orthonormal frame, a norm-style scalar.
    """
    if plane.m != pkg.m:
        raise ValueError("plane and package dimensions differ")
    frame = plane.orthonormal_basis()
    m = pkg.m
    pair = frame @ pkg.kahler_form @ frame.T
    if m == 1:
        omega_ratio = 0.0
    elif m == 2:
        omega_ratio = float(pair[0, 1])
    else:
        iu = np.triu_indices(m, k=1)
        omega_ratio = float(np.max(np.abs(pair[iu])))
    vol = pkg.holomorphic_volume(frame)
    return omega_ratio, float(vol.imag), float(vol.real)


def is_sl_plane(plane: TangentPlane, pkg: CYPackage, tol: float = 1e-10) -> bool:
    """Special Lagrangian test, choosing the orientation with Re Omega|_V >= 0."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    omega_ratio, im_ratio, re_ratio = restrict_forms(plane, pkg)
    if re_ratio < 0:
        im_ratio = -im_ratio
    return abs(omega_ratio) <= tol and abs(im_ratio) <= tol


def sl_defect(plane: TangentPlane, pkg: CYPackage) -> float:
    """max(|omega|_V|, |Im Omega|_V|) on the orthonormal frame; 0 iff SL."""
    omega_ratio, im_ratio, _ = restrict_forms(plane, pkg)
    return max(abs(omega_ratio), abs(im_ratio))


def calibration_defect(plane: TangentPlane, pkg: CYPackage) -> float:
    """vol_V - Re Omega|_V for the given oriented basis; >= 0 for every plane."""
    vol = plane.volume()
    re_val = plane.orientation * pkg.holomorphic_volume(plane.basis).real
    return float(vol - re_val)


# ---------------------------------------------------------------------------
# group actions and moment maps


def complex_matrix_to_real(A: np.ndarray) -> np.ndarray:
    """Real 2m x 2m representation of a complex m x m matrix."""
    A = np.asarray(A, dtype=complex)
    m = A.shape[0]
    M = np.zeros((2 * m, 2 * m))
    for j in range(m):
        for k in range(m):
            M[2 * j, 2 * k] = A[j, k].real
            M[2 * j, 2 * k + 1] = -A[j, k].imag
            M[2 * j + 1, 2 * k] = A[j, k].imag
            M[2 * j + 1, 2 * k + 1] = A[j, k].real
    return M


def real_matrix_to_complex(M: np.ndarray) -> np.ndarray:
    """Inverse of :func:`complex_matrix_to_real` (requires J-commuting M)."""
    M = np.asarray(M, dtype=float)
    m = M.shape[0] // 2
    J = standard_J(m)
    if not np.allclose(M @ J, J @ M, atol=1e-10):
        raise ValueError("matrix is not complex-linear")
    A = np.empty((m, m), dtype=complex)
    for j in range(m):
        for k in range(m):
            A[j, k] = M[2 * j, 2 * k] + 1j * M[2 * j + 1, 2 * k]
    return A


@dataclass
class LieAlgebraAction:
    """Generators of a subgroup of SU(m) x C^m as affine vector fields.

    Each generator is a pair (M, tau): a real 2m x 2m matrix (linear part,
    su(m) as real matrices) and a real 2m translation vector.  Generators
    must preserve omega infinitesimally: M^T W + W M = 0.
    """

    m: int
    generators: list
    labels: list | None = None

    def __post_init__(self):
        W = standard_cy_package(self.m).kahler_form
        for i, (M, tau) in enumerate(self.generators):
            M = np.asarray(M, dtype=float)
            tau = np.asarray(tau, dtype=float)
            if not np.allclose(M.T @ W + W @ M, 0.0, atol=1e-10):
                raise InvalidActionError("generator %d does not preserve omega" % i)
            self.generators[i] = (M, tau)
        if self.labels is None:
            self.labels = ["g%d" % i for i in range(len(self.generators))]


def su_diagonal_action(m: int, weights) -> LieAlgebraAction:
    """One-parameter diagonal action z_j -> e^{i w_j theta} z_j (sum w_j = 0)."""
    weights = np.asarray(weights, dtype=float)
    if abs(np.sum(weights)) > 1e-12:
        raise InvalidActionError("diagonal weights must sum to zero")
    A = np.diag(1j * weights)
    return LieAlgebraAction(m, [(complex_matrix_to_real(A), np.zeros(2 * m))])


def moment_map_values(action: LieAlgebraAction, points: np.ndarray) -> np.ndarray:
    """Standard Hamiltonians of the generators, row per point, column per generator.

    For a linear generator with complex matrix A = iH (H Hermitian) the
    Hamiltonian is zbar^T H z, which for the U(1)-action
    (z1, z2) -> (e^{i t} z1, e^{-i t} z2) is |z1|^2 - |z2|^2.  For a
    translation by tau it is omega(tau, z).  Both are fixed only up to an
    additive constant.
    """
    points = np.asarray(points, dtype=complex)
    if points.ndim == 1:
        points = points[None, :]
    W = standard_cy_package(action.m).kahler_form
    xs = real_coords(points)
    out = np.zeros((points.shape[0], len(action.generators)))
    for col, (M, tau) in enumerate(action.generators):
        if np.any(M):
            A = real_matrix_to_complex(M)
            H = -1j * A
            if not np.allclose(H, H.conj().T, atol=1e-10):
                raise InvalidActionError("linear part is not anti-Hermitian")
            out[:, col] += np.real(np.einsum("pj,jk,pk->p", points.conj(), H, points))
        if np.any(tau):
            out[:, col] += xs @ (W.T @ tau)  # omega(tau, x) = tau^T W x
    return out


def random_su_matrix(m: int, rng: np.random.Generator) -> np.ndarray:
    """Random SU(m) element: exponential of a random traceless anti-Hermitian matrix."""
    X = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    A = (X - X.conj().T) / 2.0
    A -= np.trace(A) / m * np.eye(m)
    return expm(A)


def random_plane(m: int, rng: np.random.Generator) -> TangentPlane:
    """Random oriented m-plane in R^{2m} (Gaussian basis)."""
    return TangentPlane(m, rng.standard_normal((m, 2 * m)))


def su_rotated_real_plane(m: int, gamma: np.ndarray) -> TangentPlane:
    """The plane gamma . R^m for gamma in SU(m), with its pushed-forward basis."""
    basis = np.zeros((m, 2 * m))
    for j in range(m):
        basis[j] = real_coords(gamma[:, j])
    return TangentPlane(m, basis)
