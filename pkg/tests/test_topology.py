import numpy as np
import pytest

from masspart import topology as tp
from masspart.errors import AliasingError, NearZero, ZeroVector


def circle_loop(turns, n=64, r=1.0):
    t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    return np.stack([r * np.cos(turns * t), r * np.sin(turns * t)], axis=1)


# -- winding numbers ---------------------------------------------------------------


def test_winding_unit_circle():
    assert tp.winding_number(circle_loop(1)) == 1


def test_winding_constant_vector():
    assert tp.winding_number(np.tile([0.4, -1.1], (16, 1))) == 0


def test_winding_multiple_turns():
    assert tp.winding_number(circle_loop(3)) == 3
    assert tp.winding_number(circle_loop(-2)) == -2


def test_winding_odd_harmonic_loop():
    # only odd harmonics, so g(t + pi) = -g(t) exactly; dense phase
    # unwrapping gives winding 1.0 for this coefficient choice
    t = np.linspace(0.0, 2.0 * np.pi, 64, endpoint=False)
    loop = np.stack([np.cos(t) + 0.3 * np.cos(3 * t),
                     np.sin(t) - 0.2 * np.sin(3 * t)], axis=1)
    assert np.max(np.abs(loop[32:] + loop[:32])) < 1e-14
    w = tp.winding_number(loop)
    assert w == 1
    assert w % 2 == 1


def test_winding_start_rotation_invariant():
    loop = circle_loop(2, n=128)
    base = tp.winding_number(loop)
    for s in (1, 17, 63, 100):
        assert tp.winding_number(np.roll(loop, s, axis=0)) == base


def test_winding_reversal_negates():
    loop = circle_loop(3, n=256)
    assert tp.winding_number(loop[::-1]) == -tp.winding_number(loop)


def test_winding_open_path_with_explicit_closure():
    loop = circle_loop(1, n=48)
    path = np.vstack([loop, loop[:1]])
    assert tp.winding_number(path, closed=False) == 1


def test_winding_wobbly_loops_sweep():
    """Radius modulation never changes the turn count."""
    t = np.linspace(0.0, 2.0 * np.pi, 256, endpoint=False)
    rng = np.random.default_rng(42)
    for m in (-3, -1, 0, 1, 2, 3):
        r = 1.0 + 0.3 * np.cos(5 * t + rng.uniform(0, 2 * np.pi))
        loop = np.stack([r * np.cos(m * t), r * np.sin(m * t)], axis=1)
        assert tp.winding_number(loop) == m


def test_winding_aliasing_error():
    # 3 turns in 8 samples: each step is 135 degrees
    with pytest.raises(AliasingError):
        tp.winding_number(circle_loop(3, n=8))


def test_winding_zero_vector():
    loop = circle_loop(1, n=16)
    loop[5] = [1e-13, 0.0]
    with pytest.raises(ZeroVector):
        tp.winding_number(loop)


def test_winding_input_validation():
    with pytest.raises(ValueError):
        tp.winding_number(circle_loop(1, n=7))
    with pytest.raises(ValueError):
        tp.winding_number(np.ones((16, 3)))


# -- icosphere meshes --------------------------------------------------------------


def test_icosphere_counts_and_euler():
    for level, nv, nf in ((0, 12, 20), (2, 162, 320), (3, 642, 1280)):
        verts, faces = tp.icosphere(level)
        assert verts.shape == (nv, 3)
        assert faces.shape == (nf, 3)
        edges = {tuple(sorted((t[i], t[(i + 1) % 3])))
                 for t in faces for i in range(3)}
        assert nv - len(edges) + nf == 2
        assert np.max(np.abs(np.linalg.norm(verts, axis=1) - 1.0)) < 1e-12


def test_icosphere_outward_orientation():
    verts, faces = tp.icosphere(1)
    a, b, c = verts[faces[:, 0]], verts[faces[:, 1]], verts[faces[:, 2]]
    assert np.all(np.einsum("ij,ij->i", a, np.cross(b, c)) > 0.0)


def test_icosphere_deterministic():
    v1, f1 = tp.icosphere(2)
    v2, f2 = tp.icosphere(2)
    assert np.array_equal(v1, v2) and np.array_equal(f1, f2)


def test_icosphere_rejects_negative_level():
    with pytest.raises(ValueError):
        tp.icosphere(-1)


def test_solid_angle_octant():
    e = np.eye(3)
    ang = tp.solid_angles(e[None, 0], e[None, 1], e[None, 2])
    assert ang[0] == pytest.approx(np.pi / 2, abs=1e-14)
    swapped = tp.solid_angles(e[None, 1], e[None, 0], e[None, 2])
    assert swapped[0] == pytest.approx(-np.pi / 2, abs=1e-14)


# -- sphere map degrees ------------------------------------------------------------


def linear_map(M):
    return lambda p: p @ np.asarray(M).T


def riemann_square(p):
    """z -> z^2 pulled through stereographic projection; degree 2 classic."""
    x, y, w = p[:, 0], p[:, 1], p[:, 2]
    north = np.abs(1.0 - w) < 1e-12
    denom = np.where(north, 1.0, 1.0 - w)
    z2 = ((x + 1j * y) / denom) ** 2
    s = np.abs(z2) ** 2
    out = np.stack([2 * z2.real, 2 * z2.imag, s - 1.0], axis=1) / (1.0 + s)[:, None]
    out[north] = [0.0, 0.0, 1.0]
    return out


def test_degree_identity_and_antipode():
    assert tp.sphere_map_degree(lambda p: p, level=3) == 1
    assert tp.sphere_map_degree(lambda p: -p, level=3) == -1


def test_degree_constant_map():
    f = lambda p: np.broadcast_to([0.3, -1.0, 0.2], p.shape)
    assert tp.sphere_map_degree(f, level=3) == 0


def test_degree_rotation_and_reflection():
    rng = np.random.default_rng(3)
    R = np.linalg.qr(rng.normal(size=(3, 3)))[0]
    if np.linalg.det(R) < 0:
        R[:, 0] *= -1.0
    assert tp.sphere_map_degree(linear_map(R), level=3) == 1
    assert tp.sphere_map_degree(linear_map(np.diag([1.0, 1.0, -1.0])), level=3) == -1


def test_degree_riemann_square():
    assert tp.sphere_map_degree(riemann_square, level=3) == 2
    assert tp.sphere_map_degree(riemann_square, level=4) == 2


def test_degree_twist_needs_local_refinement():
    """Rotation about z by 8*pi*z is homotopic to the identity but its image
    triangles at level 3 span far beyond a hemisphere, so this only reads 1
    through the conforming refinement path."""
    def twist(p):
        ang = 8.0 * np.pi * p[:, 2]
        c, s = np.cos(ang), np.sin(ang)
        return np.stack([c * p[:, 0] - s * p[:, 1],
                         s * p[:, 0] + c * p[:, 1], p[:, 2]], axis=1)

    assert tp.sphere_map_degree(twist, level=3) == 1


def test_degree_antipodal_maps_are_odd():
    """Odd zero-free perturbations of linear maps keep odd degree."""
    rng = np.random.default_rng(11)
    verts, _ = tp.icosphere(3)
    for _ in range(6):
        M = np.linalg.qr(rng.normal(size=(3, 3)))[0]
        a, b, c = rng.normal(size=(3, 3)) * 0.8
        t = rng.uniform(0.2, 0.45)

        def f(p):
            return p @ M.T + t * ((p @ a) * (p @ b))[:, None] * np.cross(p, c)

        if np.min(np.linalg.norm(f(verts), axis=1)) < 0.05:
            continue
        assert np.max(np.abs(f(verts) + f(-verts))) < 1e-12
        assert tp.sphere_map_degree(f, level=3) % 2 == 1


def test_degree_near_zero_map():
    # tangential projection vanishes exactly at the pole vertices
    f = lambda p: p - p[:, 2:3] * np.broadcast_to([0.0, 0.0, 1.0], p.shape)
    with pytest.raises(NearZero):
        tp.sphere_map_degree(f, level=3)


def test_degree_rejects_coarse_level():
    with pytest.raises(ValueError):
        tp.sphere_map_degree(lambda p: p, level=2)
