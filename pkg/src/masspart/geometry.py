"""Vectors, hyperplanes, frames, flags, rotations and projective maps.

Conventions used everywhere in this package:

- Points and directions are plain 1-d numpy arrays of floats; batches of
  points are (n, d) arrays, one point per row.
- Unit vectors are validated to ``abs(norm - 1) <= 1e-12`` at type boundaries.
- An oriented hyperplane with unit normal ``n`` and offset ``c`` has positive
  side ``{p : n . p - c > 0}``.
- Homogeneous coordinates append the homogenizing coordinate *last*:
  a point ``q`` in R^d lifts to ``(q, 1)``.
- The gnomonic lift sends ``q`` to ``(q, 1) / ||(q, 1)||`` on the open upper
  hemisphere of S^d; gnomonic projection inverts it.
- Angles are in radians.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import AtInfinity, DegenerateMap, DimensionMismatch, NearEquator, ZeroVector

UNIT_TOL = 1e-12
NEAR_EQUATOR_TOL = 1e-9
AT_INFINITY_TOL = 1e-12
DET_TOL = 1e-9


def as_vector(v, dim=None):
    """Coerce to a float 1-d array, optionally checking its length."""
    a = np.asarray(v, dtype=float)
    if a.ndim != 1:
        raise DimensionMismatch(f"expected a 1-d vector, got shape {a.shape}")
    if dim is not None and a.shape[0] != dim:
        raise DimensionMismatch(f"expected dimension {dim}, got {a.shape[0]}")
    return a


def unit(v):
    """Normalize v; raise ZeroVector for norms below 1e-12."""
    a = as_vector(v)
    n = np.linalg.norm(a)
    if n < 1e-12:
        raise ZeroVector(f"cannot normalize vector of norm {n:.3e}")
    return a / n


def require_unit(v, what="vector"):
    a = as_vector(v)
    if abs(np.linalg.norm(a) - 1.0) > UNIT_TOL:
        raise ZeroVector(f"{what} is not unit length (norm {np.linalg.norm(a)!r})")
    return a


def canonical_sign(v):
    """+1 or -1 by the sign of the first nonzero component.

    Odd under negation exactly in floating point; used to pick orientation
    representatives so antipodality identities hold bit-for-bit.
    """
    for x in np.asarray(v).ravel():
        if x > 0.0:
            return 1.0
        if x < 0.0:
            return -1.0
    raise ZeroVector("cannot orient the zero vector")


@dataclass(frozen=True)
class OrientedHyperplane:
    """Hyperplane {p : normal . p = offset} with a chosen positive side."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        object.__setattr__(self, "normal", require_unit(self.normal, "hyperplane normal"))
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def dim(self):
        return self.normal.shape[0]

    def signed_distance(self, points):
        p = np.asarray(points, dtype=float)
        return p @ self.normal - self.offset

    def side(self, point):
        """+1, -1, or 0 (within 1e-12 of the hyperplane)."""
        t = float(self.signed_distance(point))
        if abs(t) <= UNIT_TOL:
            return 0
        return 1 if t > 0 else -1

    def flipped(self):
        return OrientedHyperplane(-self.normal, -self.offset)

    def membership(self, points, eps=0.0, rule="half"):
        """Halfspace membership weights in [0, 1]; see masses.region_measure."""
        t = self.signed_distance(points)
        return _halfspace_membership(t, eps, rule)


def _halfspace_membership(t, eps, rule):
    from .errors import AtomOnBoundary

    t = np.atleast_1d(np.asarray(t, dtype=float))
    if eps > 0.0:
        return np.clip(t / eps + 0.5, 0.0, 1.0)
    on = np.abs(t) <= UNIT_TOL
    if rule == "strict" and np.any(on):
        raise AtomOnBoundary(f"{int(on.sum())} atom(s) within 1e-12 of the boundary")
    m = (t > 0).astype(float)
    m[on] = 0.5
    return m


@dataclass(frozen=True)
class Frame2:
    """Ordered orthonormal pair (x, y) spanning an oriented 2-plane."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = require_unit(self.x, "frame x")
        y = require_unit(self.y, "frame y")
        if x.shape != y.shape:
            raise DimensionMismatch("frame vectors of different dimension")
        if abs(float(x @ y)) > UNIT_TOL:
            raise DimensionMismatch(f"frame not orthogonal: <x,y> = {float(x @ y):.3e}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def dim(self):
        return self.x.shape[0]

    def rotated(self, angle):
        """Rotate the start ray by `angle` inside the plane, keeping orientation."""
        c, s = np.cos(angle), np.sin(angle)
        return Frame2(c * self.x + s * self.y, -s * self.x + c * self.y)


def plane_angles(points, apex_point, frame):
    """Angles and radii of points projected to an apex-anchored oriented plane.

    Returns (theta, r): theta = atan2(<p - apex, y>, <p - apex, x>) wrapped to
    [0, 2*pi), r = planar distance from the apex flat. Points with r <= 1e-12
    sit on the apex flat and have no well-defined angle.
    """
    p = np.atleast_2d(np.asarray(points, dtype=float)) - np.asarray(apex_point, dtype=float)
    a = p @ frame.x
    b = p @ frame.y
    theta = np.mod(np.arctan2(b, a), 2.0 * np.pi)
    r = np.hypot(a, b)
    return theta, r


@dataclass(frozen=True)
class OrientedFlag:
    """Oriented line inside a k-subspace: rows of `basis` are orthonormal,
    row 0 is the line direction."""

    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float)
        if b.ndim != 2:
            raise DimensionMismatch("flag basis must be a (k, d) array")
        g = b @ b.T
        if np.max(np.abs(g - np.eye(b.shape[0]))) > 1e-10:
            raise DimensionMismatch("flag basis rows are not orthonormal")
        object.__setattr__(self, "basis", b)

    @property
    def line(self):
        return self.basis[0]

    @property
    def k(self):
        return self.basis.shape[0]

    @property
    def dim(self):
        return self.basis.shape[1]

    def flipped_line(self):
        b = self.basis.copy()
        b[0] = -b[0]
        return OrientedFlag(b)


def complete_orthonormal(rows, dim):
    """Extend orthonormal `rows` (possibly empty) to a full orthonormal basis.

    Deterministic: candidate coordinate axes are adjoined in index order and
    orthonormalized by modified Gram-Schmidt.
    """
    out = [np.asarray(r, dtype=float) for r in rows]
    for i in range(dim):
        v = np.zeros(dim)
        v[i] = 1.0
        # two sweeps: one leaves O(eps) residuals when v is nearly in the span
        for _ in range(2):
            for u in out:
                v = v - (u @ v) * u
        n = np.linalg.norm(v)
        if n > 1e-8:
            out.append(v / n)
        if len(out) == dim:
            break
    if len(out) != dim:
        raise DegenerateMap("could not complete an orthonormal basis")
    return np.array(out)


def rotation_taking(u, v):
    """Rotation matrix R with R u = v, minimal in the plane of u and v.

    For u == v this is the identity. For u == -v (no spanned plane) a fixed
    180-degree rotation is used in the plane of u and the lowest-index
    coordinate axis not parallel to u.
    """
    u = require_unit(u, "rotation source")
    v = require_unit(v, "rotation target")
    d = u.shape[0]
    c = float(u @ v)
    b = v - c * u
    s = np.linalg.norm(b)
    if s <= 1e-9:
        if c > 0.0:
            # nearly aligned: the minimal rotation is numerically the identity
            if s == 0.0:
                return np.eye(d)
        else:
            # antipodal: rotate by pi in a fixed plane through u
            for i in range(d):
                axis = np.zeros(d)
                axis[i] = 1.0
                w = axis - (u @ axis) * u
                n = np.linalg.norm(w)
                if n > 1e-9:
                    w = w / n
                    return np.eye(d) - 2.0 * np.outer(u, u) - 2.0 * np.outer(w, w)
            raise DegenerateMap("no axis available for the 180-degree rotation")
    b = b / s
    # rotate by the angle between u and v inside span(u, b), fix the rest
    cos_t, sin_t = c, s
    return (
        np.eye(d)
        + (cos_t - 1.0) * (np.outer(u, u) + np.outer(b, b))
        + sin_t * (np.outer(b, u) - np.outer(u, b))
    )


def gnomonic_lift(q):
    """Lift point(s) of R^d to the open upper hemisphere of S^d."""
    a = np.asarray(q, dtype=float)
    single = a.ndim == 1
    p = np.atleast_2d(a)
    h = np.concatenate([p, np.ones((p.shape[0], 1))], axis=1)
    h = h / np.linalg.norm(h, axis=1, keepdims=True)
    return h[0] if single else h


def gnomonic_project(p):
    """Project point(s) of the open upper hemisphere back to R^d.

    Raises NearEquator when the last coordinate is <= 1e-9.
    """
    a = np.asarray(p, dtype=float)
    single = a.ndim == 1
    x = np.atleast_2d(a)
    z = x[:, -1]
    if np.any(z <= NEAR_EQUATOR_TOL):
        raise NearEquator(f"last coordinate {z.min():.3e} <= 1e-9")
    q = x[:, :-1] / z[:, None]
    return q[0] if single else q


@dataclass(frozen=True)
class ProjectiveMap:
    """Projective transformation acting on homogeneous coordinates.

    The (d+1) x (d+1) matrix is normalized to unit |determinant| on
    construction; a |determinant| below 1e-9 raises DegenerateMap.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch("projective matrix must be square")
        det = np.linalg.det(m)
        if abs(det) < DET_TOL:
            raise DegenerateMap(f"projective matrix determinant {det:.3e} below 1e-9")
        m = m / abs(det) ** (1.0 / m.shape[0])
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self):
        return self.matrix.shape[0] - 1

    def apply(self, points):
        """Map point(s); raises AtInfinity when the image last homogeneous
        coordinate is within 1e-12 of zero."""
        a = np.asarray(points, dtype=float)
        single = a.ndim == 1
        p = np.atleast_2d(a)
        if p.shape[1] != self.dim:
            raise DimensionMismatch(f"points of dimension {p.shape[1]}, map of dimension {self.dim}")
        h = np.concatenate([p, np.ones((p.shape[0], 1))], axis=1) @ self.matrix.T
        w = h[:, -1]
        if np.any(np.abs(w) <= AT_INFINITY_TOL):
            raise AtInfinity("image point at infinity (last homogeneous coordinate ~ 0)")
        q = h[:, :-1] / w[:, None]
        return q[0] if single else q

    def apply_hyperplane(self, h):
        """Image of a hyperplane (may itself be the hyperplane at infinity).

        Returns an OrientedHyperplane, or raises AtInfinity when the image is
        the hyperplane at infinity.
        """
        coeffs = np.concatenate([h.normal, [-h.offset]])
        img = np.linalg.inv(self.matrix).T @ coeffs
        n, c = img[:-1], -img[-1]
        nn = np.linalg.norm(n)
        if nn <= AT_INFINITY_TOL:
            raise AtInfinity("hyperplane maps to the hyperplane at infinity")
        return OrientedHyperplane(n / nn, c / nn)


def projective_from_hyperplane(h):
    """Projective map sending hyperplane h to the hyperplane at infinity.

    Realized by lifting to S^d, rotating the great sphere carrying h onto the
    equator (minimal rotation toward the nearer pole, so far-away hyperplanes
    give near-identity maps), and projecting back.
    """
    n = np.concatenate([h.normal, [-h.offset]])
    n = n / np.linalg.norm(n)
    d1 = n.shape[0]
    pole = np.zeros(d1)
    pole[-1] = 1.0 if n[-1] >= 0.0 else -1.0
    return ProjectiveMap(rotation_taking(n, pole))
