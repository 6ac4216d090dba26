"""Numerical topology certificates: planar winding numbers and degrees of
sphere maps.

These are the runtime witnesses that a residual map actually wraps around
zero the way the existence arguments promise: an odd winding or degree means
the map cannot be deformed off zero, so the search space really contains a
solution.
"""

import numpy as np

from .errors import AliasingError, NearZero, ZeroVector

FOUR_PI = 4.0 * np.pi


def winding_number(loop_samples, closed=True):
    """Turns of a planar loop around the origin.

    Signed angle increments between consecutive samples are summed and
    divided by 2*pi; each increment must stay below pi/2 so the shorter-arc
    reading is unambiguous. With closed=False the samples must already end
    where they started (the wrap step is not appended).
    """
    v = np.asarray(loop_samples, dtype=float)
    if v.ndim != 2 or v.shape[1] != 2:
        raise ValueError("loop samples must be an (n, 2) array")
    if v.shape[0] < 8:
        raise ValueError("need at least 8 loop samples")
    norms = np.linalg.norm(v, axis=1)
    if np.any(norms < 1e-12):
        raise ZeroVector("loop passes within 1e-12 of the origin")
    if closed:
        a, b = v, np.roll(v, -1, axis=0)
    else:
        a, b = v[:-1], v[1:]
    cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    dot = a[:, 0] * b[:, 0] + a[:, 1] * b[:, 1]
    steps = np.arctan2(cross, dot)
    if np.any(np.abs(steps) >= 0.5 * np.pi):
        raise AliasingError(
            f"angular step of {np.max(np.abs(steps)):.3f} rad >= pi/2; sample finer")
    return int(np.rint(np.sum(steps) / (2.0 * np.pi)))


# -- icosphere meshes -------------------------------------------------------------

def _icosahedron():
    t = (1.0 + np.sqrt(5.0)) / 2.0
    verts = np.array([
        [-1, t, 0], [1, t, 0], [-1, -t, 0], [1, -t, 0],
        [0, -1, t], [0, 1, t], [0, -1, -t], [0, 1, -t],
        [t, 0, -1], [t, 0, 1], [-t, 0, -1], [-t, 0, 1],
    ], dtype=float)
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    faces = np.array([
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ], dtype=int)
    return verts, faces


def icosphere(level):
    """Icosahedron subdivided `level` times, vertices on the unit sphere.

    Deterministic: midpoints are appended in first-encounter order, so equal
    levels give identical meshes. 20 * 4^level faces.
    """
    if level < 0:
        raise ValueError("subdivision level must be >= 0")
    verts, faces = _icosahedron()
    verts = [v for v in verts]
    for _ in range(level):
        cache = {}

        def midpoint(i, j):
            key = (i, j) if i < j else (j, i)
            if key not in cache:
                m = verts[i] + verts[j]
                verts.append(m / np.linalg.norm(m))
                cache[key] = len(verts) - 1
            return cache[key]

        out = np.empty((4 * faces.shape[0], 3), dtype=int)
        for f, (a, b, c) in enumerate(faces):
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            out[4 * f:4 * f + 4] = [[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]
        faces = out
    return np.array(verts), faces


def solid_angles(a, b, c):
    """Signed solid angles of unit-vector triangles (vectorized rows)."""
    det = np.einsum("ij,ij->i", a, np.cross(b, c))
    den = 1.0 + np.einsum("ij,ij->i", a, b) + np.einsum("ij,ij->i", b, c) \
        + np.einsum("ij,ij->i", c, a)
    return 2.0 * np.arctan2(det, den)


def _normalized_values(f, points):
    vals = np.atleast_2d(np.asarray(f(points), dtype=float))
    norms = np.linalg.norm(vals, axis=1)
    if np.any(norms < 1e-9):
        raise NearZero("map norm below 1e-9 on the mesh; it may have a zero")
    return vals / norms[:, None]


def _edge_dots(img, faces):
    a, b, c = img[faces[:, 0]], img[faces[:, 1]], img[faces[:, 2]]
    return np.stack([np.einsum("ij,ij->i", a, b),
                     np.einsum("ij,ij->i", b, c),
                     np.einsum("ij,ij->i", c, a)], axis=1)


def _retriangulate(faces, split):
    """Conforming split pass: every face is retriangulated against whichever
    of its edges are in `split` (a dict edge -> midpoint index), so two faces
    sharing an edge always agree on its subdivision and the mesh stays a
    closed surface. That closure is what keeps the total signed area an exact
    multiple of 4*pi."""
    out = []
    for tri in faces:
        p = list(tri)
        hit = [tuple(sorted((p[i], p[(i + 1) % 3]))) in split for i in range(3)]
        n = sum(hit)
        # rotate so the split edges are e01 (n=1) or e01+e12 (n=2)
        while not (n in (0, 3) or (hit[0] and (hit[1] or n == 1))):
            p = p[1:] + p[:1]
            hit = hit[1:] + hit[:1]
        m = [split.get(tuple(sorted((p[i], p[(i + 1) % 3])))) for i in range(3)]
        if n == 0:
            out.append(p)
        elif n == 1:
            out += [[p[0], m[0], p[2]], [m[0], p[1], p[2]]]
        elif n == 2:
            out += [[m[0], p[1], m[1]], [m[0], m[1], p[2]], [m[0], p[2], p[0]]]
        else:
            out += [[p[0], m[0], m[2]], [m[0], p[1], m[1]],
                    [m[2], m[1], p[2]], [m[0], m[1], m[2]]]
    return np.array(out, dtype=int)


def sphere_map_degree(f, level=4, max_refine_rounds=12):
    """Degree of a map S^2 -> R^3 \\ {0}, normalized to the unit sphere.

    f must accept an (n, 3) array of unit vectors and return (n, 3) values.
    Image triangle solid angles are summed over an icosphere and divided by
    4*pi. Faces whose image is not contained well inside a hemisphere (some
    image edge turns by a quarter or more, making the closed-form angle
    ambiguous) get all their edges split and the mesh is retriangulated
    conformingly, locally, until every face reads unambiguously. Raises
    NearZero when any evaluation drops below 1e-9 (the map may have a zero,
    which for a residual search is success, handled by the caller).
    """
    if level < 3:
        raise ValueError("subdivision level must be >= 3")
    verts, faces = icosphere(level)
    img = _normalized_values(f, verts)
    verts, img = list(verts), list(img)
    rounds = 0
    while True:
        wide = np.min(_edge_dots(np.asarray(img), faces), axis=1) <= 0.0
        if not np.any(wide):
            break
        if rounds == max_refine_rounds:
            raise AliasingError(
                "image triangles still span a hemisphere after "
                f"{max_refine_rounds} refinement rounds")
        rounds += 1
        new_pts, split = [], {}
        for tri in faces[wide]:
            for i in range(3):
                key = tuple(sorted((tri[i], tri[(i + 1) % 3])))
                if key not in split:
                    d = verts[key[0]] + verts[key[1]]
                    new_pts.append(d / np.linalg.norm(d))
                    split[key] = len(verts) + len(new_pts) - 1
        verts += new_pts
        img += list(_normalized_values(f, np.array(new_pts)))
        faces = _retriangulate(faces, split)
    img = np.asarray(img)
    total = float(np.sum(solid_angles(img[faces[:, 0]], img[faces[:, 1]],
                                      img[faces[:, 2]])))
    deg = total / FOUR_PI
    r = int(np.rint(deg))
    if abs(deg - r) > 0.01:
        raise AliasingError(
            f"summed solid angles give {deg:.6f}, not close to an integer; "
            "increase the subdivision level")
    return r
