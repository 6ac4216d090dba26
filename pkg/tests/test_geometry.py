import numpy as np
import pytest

from masspart import geometry as g
from masspart.errors import (
    AtInfinity,
    AtomOnBoundary,
    DegenerateMap,
    DimensionMismatch,
    NearEquator,
    ZeroVector,
)


def test_unit_and_zero_vector():
    v = g.unit([3.0, 4.0])
    assert np.allclose(v, [0.6, 0.8], atol=1e-15)
    with pytest.raises(ZeroVector):
        g.unit([0.0, 1e-13])


def test_require_unit_tolerance():
    g.require_unit([1.0, 0.0])
    with pytest.raises(ZeroVector):
        g.require_unit([1.0 + 1e-10, 0.0])


def test_canonical_sign_is_odd():
    rng = np.random.default_rng(7)
    for _ in range(50):
        v = rng.standard_normal(4)
        assert g.canonical_sign(v) == -g.canonical_sign(-v)
    assert g.canonical_sign([0.0, 0.0, -2.0]) == -1.0


def test_hyperplane_sides_and_flip():
    h = g.OrientedHyperplane([0.0, 1.0], 2.0)
    assert h.side([5.0, 3.0]) == 1
    assert h.side([5.0, 1.0]) == -1
    assert h.side([5.0, 2.0]) == 0
    hf = h.flipped()
    assert hf.side([5.0, 3.0]) == -1
    t = h.signed_distance(np.array([[0.0, 0.0], [1.0, 4.5]]))
    assert np.allclose(t, [-2.0, 2.5], atol=1e-15)


def test_halfspace_membership_rules():
    h = g.OrientedHyperplane([1.0, 0.0], 0.0)
    pts = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 3.0]])
    m = h.membership(pts)
    assert np.allclose(m, [1.0, 0.0, 0.5], atol=0)
    with pytest.raises(AtomOnBoundary):
        h.membership(pts, rule="strict")
    # linear ramp of width eps centered on the boundary
    m = h.membership(np.array([[0.25, 0.0], [-1.0, 0.0]]), eps=1.0)
    assert np.allclose(m, [0.75, 0.0], atol=1e-15)


def test_frame_rotated_stays_orthonormal():
    rng = np.random.default_rng(3)
    x = g.unit(rng.standard_normal(5))
    y = rng.standard_normal(5)
    y = g.unit(y - (y @ x) * x)
    f = g.Frame2(x, y)
    f2 = f.rotated(0.7)
    assert abs(f2.x @ f2.y) < 1e-14
    # rotating the frame by a moves the measured angle of a fixed point by -a
    p = 2.0 * x + 0.5 * y
    th0, _ = g.plane_angles(p, np.zeros(5), f)
    th1, _ = g.plane_angles(p, np.zeros(5), f2)
    assert abs((th0[0] - th1[0]) % (2 * np.pi) - 0.7) < 1e-12


def test_plane_angles_values():
    f = g.Frame2([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
    pts = np.array([[1.0, 0.0, 9.0], [0.0, 2.0, -1.0], [-3.0, 0.0, 0.0]])
    th, r = g.plane_angles(pts, np.zeros(3), f)
    assert np.allclose(th, [0.0, np.pi / 2, np.pi], atol=1e-15)
    assert np.allclose(r, [1.0, 2.0, 3.0], atol=1e-15)


def test_flag_orthonormal_and_flip():
    b = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
    fl = g.OrientedFlag(b)
    assert fl.k == 2 and fl.dim == 3
    assert np.allclose(fl.flipped_line().line, [-1.0, 0.0, 0.0])
    with pytest.raises(DimensionMismatch):
        g.OrientedFlag(np.array([[1.0, 1.0, 0.0], [0.0, 1.0, 0.0]]))


def test_complete_orthonormal():
    rng = np.random.default_rng(11)
    u = g.unit(rng.standard_normal(6))
    basis = g.complete_orthonormal([u], 6)
    assert basis.shape == (6, 6)
    assert np.max(np.abs(basis @ basis.T - np.eye(6))) < 1e-12
    assert np.allclose(basis[0], u)


def test_rotation_taking_properties():
    rng = np.random.default_rng(19)
    for _ in range(100):
        d = rng.integers(2, 7)
        u = g.unit(rng.standard_normal(d))
        v = g.unit(rng.standard_normal(d))
        r = g.rotation_taking(u, v)
        assert np.max(np.abs(r @ u - v)) < 1e-12
        assert np.max(np.abs(r @ r.T - np.eye(d))) < 1e-12
        assert abs(np.linalg.det(r) - 1.0) < 1e-9
        # vectors orthogonal to span(u, v) are fixed
        w = rng.standard_normal(d)
        w = w - (w @ u) * u
        vv = v - (v @ u) * u
        nv = np.linalg.norm(vv)
        if nv > 1e-6:
            w = w - (w @ vv) * vv / nv**2
        if np.linalg.norm(w) > 1e-6:
            w = g.unit(w)
            assert np.max(np.abs(r @ w - w)) < 1e-9


def test_rotation_taking_edge_cases():
    u = g.unit([1.0, 2.0, 3.0])
    assert np.array_equal(g.rotation_taking(u, u), np.eye(3))
    r = g.rotation_taking(u, -u)
    assert np.max(np.abs(r @ u + u)) < 1e-12
    assert abs(np.linalg.det(r) - 1.0) < 1e-9


def test_gnomonic_roundtrip():
    rng = np.random.default_rng(23)
    for scale in (1.0, 1e3, 1e6):
        q = rng.standard_normal((50, 4)) * scale
        p = g.gnomonic_lift(q)
        assert np.max(np.abs(np.linalg.norm(p, axis=1) - 1.0)) < 1e-12
        assert np.all(p[:, -1] > 0)
        back = g.gnomonic_project(p)
        err = np.linalg.norm(back - q, axis=1) / np.maximum(1.0, np.linalg.norm(q, axis=1))
        assert np.max(err) < 1e-12


def test_gnomonic_single_point_and_equator():
    p = g.gnomonic_lift([1.0, 0.0])
    assert p.shape == (3,)
    with pytest.raises(NearEquator):
        g.gnomonic_project([1.0, 0.0, 1e-10])


def test_lift_sends_lines_to_great_circles():
    # oracle: lifted collinear points lie on a plane through the origin
    rng = np.random.default_rng(31)
    for _ in range(20):
        a = rng.standard_normal(3) * 5
        b = rng.standard_normal(3) * 5
        t = rng.uniform(-3, 3, size=12)
        pts = a[None, :] + t[:, None] * b[None, :]
        lifted = g.gnomonic_lift(pts)
        _, sv, _ = np.linalg.svd(lifted)
        assert sv[-1] < 1e-12  # rank 3: all on a central 3-plane of R^4


def test_projective_map_normalization_and_degenerate():
    m = g.ProjectiveMap(5.0 * np.eye(4))
    assert abs(abs(np.linalg.det(m.matrix)) - 1.0) < 1e-12
    with pytest.raises(DegenerateMap):
        g.ProjectiveMap(np.zeros((3, 3)))


def test_projective_map_preserves_collinearity():
    rng = np.random.default_rng(41)
    mat = rng.standard_normal((4, 4))
    mat += 4.0 * np.eye(4)  # keep images finite
    phi = g.ProjectiveMap(mat)
    for _ in range(100):
        a, b = rng.standard_normal(3), rng.standard_normal(3)
        t = np.sort(rng.uniform(-1, 1, size=3))
        pts = a[None, :] + t[:, None] * b[None, :]
        img = phi.apply(pts)
        u = img[1] - img[0]
        v = img[2] - img[0]
        area = np.linalg.norm(np.cross(u, v))
        assert area / max(1.0, np.linalg.norm(u) * np.linalg.norm(v)) < 1e-9


def test_projective_from_hyperplane_sends_h_to_infinity():
    rng = np.random.default_rng(43)
    for _ in range(25):
        n = g.unit(rng.standard_normal(3))
        c = rng.uniform(-4, 4)
        h = g.OrientedHyperplane(n, c)
        phi = g.projective_from_hyperplane(h)
        # points on h: last homogeneous image coordinate vanishes
        basis = g.complete_orthonormal([n], 3)
        p = c * n + rng.uniform(-2, 2) * basis[1] + rng.uniform(-2, 2) * basis[2]
        hom = np.concatenate([p, [1.0]])
        img = phi.matrix @ hom
        assert abs(img[-1]) < 1e-9 * np.linalg.norm(hom)
        with pytest.raises(AtInfinity):
            phi.apply(p)


def test_projective_from_far_hyperplane_is_near_identity():
    h = g.OrientedHyperplane([1.0, 0.0, 0.0], 1e6)
    phi = g.projective_from_hyperplane(h)
    rng = np.random.default_rng(47)
    pts = rng.uniform(-10, 10, size=(200, 3))
    img = phi.apply(pts)
    rel = np.linalg.norm(img - pts, axis=1) / np.maximum(1.0, np.linalg.norm(pts, axis=1))
    assert np.max(rel) < 1e-4


def test_apply_hyperplane_consistent_with_apply():
    rng = np.random.default_rng(53)
    mat = rng.standard_normal((4, 4)) + 4.0 * np.eye(4)
    phi = g.ProjectiveMap(mat)
    h = g.OrientedHyperplane(g.unit([1.0, -2.0, 0.5]), 0.8)
    img_h = phi.apply_hyperplane(h)
    basis = g.complete_orthonormal([h.normal], 3)
    for _ in range(20):
        p = h.offset * h.normal + rng.uniform(-1, 1) * basis[1] + rng.uniform(-1, 1) * basis[2]
        q = phi.apply(p)
        assert abs(img_h.signed_distance(q)) < 1e-9


def test_apply_raises_at_infinity():
    # maps e_1 direction points with x = 1 to infinity
    mat = np.eye(4)
    mat[3] = [1.0, 0.0, 0.0, -1.0]
    mat[3, 3] = -1.0
    phi = g.ProjectiveMap(mat)
    with pytest.raises(AtInfinity):
        phi.apply([1.0, 5.0, 5.0])
