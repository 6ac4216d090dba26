"""Partition regions: k-fans, k-cones, double wedges, double-wedge fans and
slab partitions, with raw and smoothed membership, builders and serialization.

Membership conventions shared by every region type:

- membership(points, eps, rule) returns per-point weights in [0, 1].
- eps = 0 is the raw set: atoms within 1e-12 of the boundary contribute 1/2
  under rule="half" and raise AtomOnBoundary under rule="strict".
- eps > 0 smears each atom over an eps-arc of angles about the apex (fan
  sectors, cones, dw-fans) or an eps-wide ramp of signed distance
  (double wedges, slabs), making measures continuous in region parameters.
- Atoms projecting onto the apex flat itself have no direction; they count
  with the sector's fraction of the full turn (fans) or 1/2 (cones, wedges),
  in both modes, which keeps partition measures additive.

Angles follow the orientation of the defining Frame2; "clockwise" anywhere
in this package means decreasing angle in that orientation.
"""

from dataclasses import dataclass

import numpy as np

from ._circular import CircularCDF, polar_cap_cdf
from .errors import AtomOnBoundary, DegenerateProjection, DimensionMismatch
from .geometry import Frame2, OrientedHyperplane, plane_angles, require_unit

BOUNDARY_TOL = 1e-12
TWO_PI = 2.0 * np.pi


class _BoundaryType:
    __slots__ = ()

    def __repr__(self):
        return "Boundary"

    def __bool__(self):
        raise TypeError("Boundary is neither inside nor outside; compare with 'is'")


Boundary = _BoundaryType()


def _raise_if_strict(on_boundary, rule):
    if rule == "strict" and np.any(on_boundary):
        raise AtomOnBoundary(f"{int(np.sum(on_boundary))} atom(s) within 1e-12 of the boundary")


def _arc_overlap(x, width, eps, period):
    """Fraction of the eps-arc centered at x (taken mod period) inside the
    sector [0, width]."""
    lo = x - 0.5 * eps
    hi = x + 0.5 * eps
    out = np.zeros_like(x)
    for s in (-period, 0.0, period):
        out += np.maximum(0.0, np.minimum(hi, width + s) - np.maximum(lo, s))
    return out / eps


def _sector_membership(x, width, eps, rule, period):
    if eps > 0.0:
        return _arc_overlap(x, width, eps, period)
    on = (np.minimum(x, period - x) <= BOUNDARY_TOL) | (np.abs(x - width) <= BOUNDARY_TOL)
    _raise_if_strict(on, rule)
    return np.where(on, 0.5, ((x > 0.0) & (x < width)).astype(float))


# -- k-fans -------------------------------------------------------------------

@dataclass(frozen=True)
class KFan:
    """k rays from an apex flat, seen in an oriented 2-plane.

    Sector W_j (1-based) spans [cut_angles[j-1], cut_angles[j]] in the frame's
    orientation, cyclically; sector_targets, when present, records the mass
    fraction each sector was built to hold. sweep_offset records where the
    builder's sweep landed in the sorted cut list: the sector beginning at
    cut_angles[0] held target index sweep_offset. The sweep visits sorted
    sectors cyclically, so the sector beginning at cut_angles[i] held target
    (sweep_offset + i) mod k. Sorting alone cannot recover this: the last cut
    of a sweep may wrap past the start angle into the leading gap.
    """

    plane_frame: Frame2
    apex_point: np.ndarray
    cut_angles: np.ndarray
    sector_targets: tuple = None
    sweep_offset: int = None

    def __post_init__(self):
        cuts = np.asarray(self.cut_angles, dtype=float)
        if cuts.ndim != 1 or cuts.shape[0] < 2:
            raise ValueError("a fan needs at least 2 cut angles")
        if np.any(cuts < 0) or np.any(cuts >= TWO_PI) or np.any(np.diff(cuts) <= 0):
            raise ValueError("cut angles must be strictly increasing within [0, 2*pi)")
        apex = np.asarray(self.apex_point, dtype=float)
        if apex.shape[0] != self.plane_frame.dim:
            raise DimensionMismatch("apex point dimension does not match the frame")
        object.__setattr__(self, "cut_angles", cuts)
        object.__setattr__(self, "apex_point", apex)
        if self.sector_targets is not None:
            t = tuple(float(v) for v in self.sector_targets)
            if len(t) != cuts.shape[0]:
                raise ValueError("need one sector target per cut")
            object.__setattr__(self, "sector_targets", t)
        if self.sweep_offset is not None:
            off = int(self.sweep_offset)
            if not 0 <= off < cuts.shape[0]:
                raise ValueError("sweep offset must index a sector")
            object.__setattr__(self, "sweep_offset", off)

    @property
    def k(self):
        return self.cut_angles.shape[0]

    def sector(self, j):
        """Sector W_{j+1} (0-based j) as a measurable region."""
        return FanSector(self, int(j))

    def sector_width(self, j):
        cuts = self.cut_angles
        return float(np.mod(cuts[(j + 1) % self.k] - cuts[j], TWO_PI)) if self.k > 1 else TWO_PI

    def measures(self, mu, eps=None, rule="half"):
        """All k sector masses of mu in one pass over the atoms. eps=None
        uses mu's own smoothing radius; the shared angle computation keeps
        the sector sum equal to the total within accumulated rounding."""
        e = mu.smoothing_radius if eps is None else float(eps)
        theta, r = plane_angles(mu.points, self.apex_point, self.plane_frame)
        apex = r <= BOUNDARY_TOL
        out = np.empty(self.k)
        for j in range(self.k):
            x = np.mod(theta - self.cut_angles[j], TWO_PI)
            width = self.sector_width(j)
            m = _sector_membership(x, width, e, rule, TWO_PI)
            out[j] = float(np.sum(mu.weights * np.where(apex, width / TWO_PI, m)))
        return out


@dataclass(frozen=True)
class FanSector:
    fan: KFan
    index: int

    def membership(self, points, eps=0.0, rule="half"):
        fan = self.fan
        theta, r = plane_angles(points, fan.apex_point, fan.plane_frame)
        x = np.mod(theta - fan.cut_angles[self.index], TWO_PI)
        width = fan.sector_width(self.index)
        m = _sector_membership(x, width, eps, rule, TWO_PI)
        return np.where(r <= BOUNDARY_TOL, width / TWO_PI, m)


def fan_sector_index(fan, p):
    """1-based sector index of p, or Boundary (apex flat or on a cut ray)."""
    theta, r = plane_angles(p, fan.apex_point, fan.plane_frame)
    if r[0] <= BOUNDARY_TOL:
        return Boundary
    rel = np.mod(theta[0] - fan.cut_angles, TWO_PI)
    j = int(np.argmin(rel))
    if rel[j] <= BOUNDARY_TOL or rel[j] >= fan.sector_width(j) - BOUNDARY_TOL:
        return Boundary
    return j + 1


# -- k-cones ------------------------------------------------------------------

@dataclass(frozen=True)
class KCone:
    """Preimage under projection to span(subspace_basis) of the spherical
    cone with the given apex, axis and half-angle (all in H_k coordinates)."""

    subspace_basis: np.ndarray
    apex_point: np.ndarray
    axis: np.ndarray
    half_angle: float

    def __post_init__(self):
        b = np.atleast_2d(np.asarray(self.subspace_basis, dtype=float))
        if np.max(np.abs(b @ b.T - np.eye(b.shape[0]))) > 1e-10:
            raise DimensionMismatch("subspace basis rows are not orthonormal")
        k = b.shape[0]
        apex = np.asarray(self.apex_point, dtype=float)
        axis = require_unit(self.axis, "cone axis")
        if apex.shape[0] != k or axis.shape[0] != k:
            raise DimensionMismatch("apex and axis must be in subspace coordinates")
        if not 0.0 <= self.half_angle <= np.pi:
            raise ValueError("half angle must lie in [0, pi]")
        object.__setattr__(self, "subspace_basis", b)
        object.__setattr__(self, "apex_point", apex)
        object.__setattr__(self, "axis", axis)
        object.__setattr__(self, "half_angle", float(self.half_angle))

    @property
    def k(self):
        return self.subspace_basis.shape[0]

    @property
    def dim(self):
        return self.subspace_basis.shape[1]

    def polar_angles(self, points):
        """(psi, r): angle from the axis and planar distance from the apex,
        after projection to H_k."""
        p = np.atleast_2d(np.asarray(points, dtype=float))
        x = p @ self.subspace_basis.T - self.apex_point
        along = x @ self.axis
        perp = np.linalg.norm(x - np.outer(along, self.axis), axis=1)
        return np.arctan2(perp, along), np.linalg.norm(x, axis=1)

    def membership(self, points, eps=0.0, rule="half"):
        psi, r = self.polar_angles(points)
        if eps > 0.0:
            m = np.clip((self.half_angle - psi) / eps + 0.5, 0.0, 1.0)
        else:
            on = np.abs(psi - self.half_angle) <= BOUNDARY_TOL
            _raise_if_strict(on & (r > BOUNDARY_TOL), rule)
            m = np.where(on, 0.5, (psi <= self.half_angle).astype(float))
        return np.where(r <= BOUNDARY_TOL, 0.5, m)


def cone_contains(cone, p):
    """True/False, or Boundary (angle within 1e-12 of the half-angle, or on
    the apex flat)."""
    psi, r = cone.polar_angles(p)
    if r[0] <= BOUNDARY_TOL or abs(psi[0] - cone.half_angle) <= BOUNDARY_TOL:
        return Boundary
    return bool(psi[0] < cone.half_angle)


# -- double wedges ------------------------------------------------------------

@dataclass(frozen=True)
class DoubleWedge:
    """(h1+ n h2+) u (h1- n h2-). Flipping exactly one hyperplane gives the
    complement."""

    h1: OrientedHyperplane
    h2: OrientedHyperplane

    def membership(self, points, eps=0.0, rule="half"):
        t1 = self.h1.signed_distance(np.atleast_2d(np.asarray(points, dtype=float)))
        t2 = self.h2.signed_distance(np.atleast_2d(np.asarray(points, dtype=float)))
        if eps > 0.0:
            s1 = np.clip(t1 / eps + 0.5, 0.0, 1.0)
            s2 = np.clip(t2 / eps + 0.5, 0.0, 1.0)
        else:
            on1 = np.abs(t1) <= BOUNDARY_TOL
            on2 = np.abs(t2) <= BOUNDARY_TOL
            _raise_if_strict(on1 | on2, rule)
            s1 = np.where(on1, 0.5, (t1 > 0).astype(float))
            s2 = np.where(on2, 0.5, (t2 > 0).astype(float))
        return s1 * s2 + (1.0 - s1) * (1.0 - s2)


def double_wedge_contains(dw, p):
    t1 = float(dw.h1.signed_distance(p))
    t2 = float(dw.h2.signed_distance(p))
    if abs(t1) <= BOUNDARY_TOL or abs(t2) <= BOUNDARY_TOL:
        return Boundary
    return t1 * t2 > 0


# -- fans of double wedges ----------------------------------------------------

@dataclass(frozen=True)
class DwFan:
    """k full lines through an apex in an oriented 2-plane. The 2k sectors
    pair up: sector j and sector j+k form double wedge D_{j+1}, which is the
    set of directions with angle mod pi in [line_angles[j], line_angles[j+1])."""

    plane_frame: Frame2
    apex_point: np.ndarray
    line_angles: np.ndarray

    def __post_init__(self):
        lines = np.asarray(self.line_angles, dtype=float)
        if lines.ndim != 1 or lines.shape[0] < 1:
            raise ValueError("a dw-fan needs at least one line")
        if np.any(lines < 0) or np.any(lines >= np.pi) or np.any(np.diff(lines) <= 0):
            raise ValueError("line angles must be strictly increasing within [0, pi)")
        apex = np.asarray(self.apex_point, dtype=float)
        if apex.shape[0] != self.plane_frame.dim:
            raise DimensionMismatch("apex point dimension does not match the frame")
        object.__setattr__(self, "line_angles", lines)
        object.__setattr__(self, "apex_point", apex)

    @property
    def k(self):
        return self.line_angles.shape[0]

    def pair_width(self, j):
        lines = self.line_angles
        return float(np.mod(lines[(j + 1) % self.k] - lines[j], np.pi)) if self.k > 1 else np.pi

    def pair(self, j):
        """Double wedge D_{j+1} (0-based j) as a measurable region."""
        return DwPair(self, int(j))


@dataclass(frozen=True)
class DwPair:
    fan: DwFan
    index: int

    def membership(self, points, eps=0.0, rule="half"):
        fan = self.fan
        theta, r = plane_angles(points, fan.apex_point, fan.plane_frame)
        x = np.mod(theta - fan.line_angles[self.index], np.pi)
        width = fan.pair_width(self.index)
        m = _sector_membership(x, width, eps, rule, np.pi)
        return np.where(r <= BOUNDARY_TOL, width / np.pi, m)


# -- slab partitions ----------------------------------------------------------

@dataclass(frozen=True)
class SlabPartition:
    """k slabs cut by k-1 parallel hyperplanes {normal . p = offset_i}."""

    normal: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        n = require_unit(self.normal, "slab normal")
        offs = np.asarray(self.offsets, dtype=float)
        if offs.ndim != 1 or (offs.shape[0] > 1 and np.any(np.diff(offs) <= 0)):
            raise ValueError("offsets must be strictly increasing")
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offsets", offs)

    @property
    def k(self):
        return self.offsets.shape[0] + 1

    def slab(self, j):
        return Slab(self, int(j))

    def hyperplanes(self):
        return [OrientedHyperplane(self.normal, c) for c in self.offsets]


@dataclass(frozen=True)
class Slab:
    partition: SlabPartition
    index: int

    def membership(self, points, eps=0.0, rule="half"):
        sp = self.partition
        t = np.atleast_2d(np.asarray(points, dtype=float)) @ sp.normal
        lo = -np.inf if self.index == 0 else sp.offsets[self.index - 1]
        hi = np.inf if self.index == sp.k - 1 else sp.offsets[self.index]
        if eps > 0.0:
            above_lo = np.clip((t - lo) / eps + 0.5, 0.0, 1.0) if np.isfinite(lo) else np.ones_like(t)
            above_hi = np.clip((t - hi) / eps + 0.5, 0.0, 1.0) if np.isfinite(hi) else np.zeros_like(t)
            return above_lo - above_hi
        on = (np.abs(t - lo) <= BOUNDARY_TOL) | (np.abs(t - hi) <= BOUNDARY_TOL)
        _raise_if_strict(on, rule)
        return np.where(on, 0.5, ((t > lo) & (t < hi)).astype(float))


# -- complements --------------------------------------------------------------

def complement(region):
    """Complement within the same region family: cones flip axis and take
    half-angle pi - alpha; double wedges reorient h2; halfspaces flip."""
    if isinstance(region, KCone):
        return KCone(region.subspace_basis, region.apex_point, -region.axis,
                     np.pi - region.half_angle)
    if isinstance(region, DoubleWedge):
        return DoubleWedge(region.h1, region.h2.flipped())
    if isinstance(region, OrientedHyperplane):
        return region.flipped()
    raise TypeError(f"no complement for region type {type(region).__name__}")


# -- builders -----------------------------------------------------------------

def _directional_atoms(mu, apex_point, frame):
    theta, r = plane_angles(mu.points, apex_point, frame)
    keep = r > BOUNDARY_TOL
    return theta[keep], mu.weights[keep], float(np.sum(mu.weights[~keep]))


def _check_concentration(theta, w, min_target, total, period):
    """Reject projections with >= (1 - min target) of the mass inside a
    1e-9 arc: quantiles are meaningless there."""
    if theta.size == 0:
        raise DegenerateProjection("no atoms project off the apex flat")
    order = np.argsort(theta)
    x = np.concatenate([theta[order], theta[order] + period])
    ww = np.concatenate([w[order], w[order]])
    csum = np.concatenate([[0.0], np.cumsum(ww)])
    hi = np.searchsorted(x, x[:theta.size] + 1e-9, side="right")
    windows = csum[hi] - csum[:theta.size]
    if np.max(windows) >= (1.0 - min_target) * total - 1e-15:
        raise DegenerateProjection(
            "projected mass concentrates in a 1e-9 arc; fan cuts are degenerate")


def build_equipartition_fan(plane_frame, apex_point, mu_ref, targets, start_angle=0.0):
    """Fan whose smoothed sector measures of mu_ref equal targets * total.

    Cut angles are circular quantiles of the projected angle distribution,
    swept from start_angle; plateau quantiles take the plateau midpoint. The
    sector beginning at start_angle holds targets[0], the next targets[1],
    and so on; sector_targets on the result keeps that labeling after cuts
    are sorted into the canonical increasing order.
    """
    targets = np.asarray(targets, dtype=float)
    if targets.ndim != 1 or targets.shape[0] < 2:
        raise ValueError("need at least 2 targets")
    if np.any(targets <= 0) or abs(targets.sum() - 1.0) > 1e-10:
        raise ValueError("targets must be positive and sum to 1")
    theta, w, _ = _directional_atoms(mu_ref, apex_point, plane_frame)
    total = float(np.sum(w)) if w.size else 0.0
    _check_concentration(theta, w, float(targets.min()), total, TWO_PI)
    cdf = CircularCDF(theta, w, start=start_angle, eps=mu_ref.smoothing_radius)
    rel = cdf.equipartition_cuts(targets)
    cuts = np.mod(start_angle + rel, TWO_PI)
    order = np.argsort(cuts, kind="stable")
    # the sector that starts at sweep cut j holds target (j+1) mod k
    k = targets.shape[0]
    sector_targets = tuple(float(targets[(j + 1) % k]) for j in order)
    return KFan(plane_frame, apex_point, cuts[order], sector_targets,
                int(order[0] + 1) % k)


def build_bisecting_cone(flag, apex_point, mu_total):
    """The cone with subspace, axis and apex taken from the flag data that
    bisects mu_total: half-angle is the polar-angle quantile at half mass.

    apex_point is an ambient point; atoms projecting exactly onto the apex
    contribute half to both sides and drop out of the quantile.
    """
    basis = flag.basis
    apex = basis @ np.asarray(apex_point, dtype=float)
    axis = np.zeros(basis.shape[0])
    axis[0] = 1.0
    cone = KCone(basis, apex, axis, 0.0)
    psi, r = cone.polar_angles(mu_total.points)
    keep = r > BOUNDARY_TOL
    apex_weight = float(np.sum(mu_total.weights[~keep]))
    cdf = polar_cap_cdf(psi[keep], mu_total.weights[keep], eps=mu_total.smoothing_radius)
    target = 0.5 * (mu_total.total - apex_weight)
    alpha = cdf.quantile(target)
    return KCone(basis, apex, axis, min(max(alpha, 0.0), np.pi))


def _bisecting_line_angle(cdf, total):
    """Angle b in [0, pi] with mass([start+b, start+b+pi)) = total/2.

    G(b) = F(b+pi) - F(b) - total/2 is piecewise linear with G(pi) = -G(0),
    so a zero exists; the first zero is returned (plateau zeros by midpoint).
    """
    xs = cdf._plf.xs
    bs = np.unique(np.clip(np.concatenate([xs, xs - np.pi, [0.0, np.pi]]), 0.0, np.pi))
    g = cdf.value(bs + np.pi) - cdf.value(bs) - 0.5 * total
    for i in range(bs.shape[0] - 1):
        g0, g1 = g[i], g[i + 1]
        if g0 == 0.0:
            j = i
            while j + 1 < bs.shape[0] and g[j + 1] == 0.0:
                j += 1
            return 0.5 * (bs[i] + bs[j])
        if g0 * g1 < 0.0:
            return bs[i] + (bs[i + 1] - bs[i]) * (-g0) / (g1 - g0)
    return float(bs[-1])


def build_dw_fan(plane_frame, apex_point, mu_ref, k, start_angle=0.0):
    """k lines through the apex so that each double wedge (opposite sector
    pair) holds 1/k of mu_ref's smoothed mass. Works on the folded circle of
    period pi, since opposite rays bound the same double wedge. For k=1 the
    single line bisects the projected mass instead (the 1/1 target is vacuous).
    """
    if k < 1:
        raise ValueError("k must be positive")
    theta, w, _ = _directional_atoms(mu_ref, apex_point, plane_frame)
    total = float(np.sum(w)) if w.size else 0.0
    if k == 1:
        _check_concentration(np.mod(theta, TWO_PI), w, 0.5, total, TWO_PI)
        cdf = CircularCDF(theta, w, start=start_angle, eps=mu_ref.smoothing_radius)
        b = _bisecting_line_angle(cdf, total)
        return DwFan(plane_frame, apex_point, [np.mod(start_angle + b, np.pi)])
    _check_concentration(np.mod(theta, np.pi), w, 1.0 / k, total, np.pi)
    cdf = CircularCDF(theta, w, period=np.pi, start=start_angle, eps=mu_ref.smoothing_radius)
    rel = cdf.equipartition_cuts(np.full(k, 1.0 / k))
    lines = np.sort(np.mod(start_angle + rel, np.pi))
    return DwFan(plane_frame, apex_point, lines)


# -- serialization ------------------------------------------------------------

def region_to_doc(region):
    if isinstance(region, KFan):
        doc = {
            "type": "kfan",
            "planeFrame": {"x": region.plane_frame.x, "y": region.plane_frame.y},
            "apexPoint": region.apex_point,
            "cutAngles": region.cut_angles,
        }
        if region.sector_targets is not None:
            doc["sectorTargets"] = list(region.sector_targets)
        if region.sweep_offset is not None:
            doc["sweepOffset"] = region.sweep_offset
        return doc
    if isinstance(region, KCone):
        return {
            "type": "kcone",
            "subspaceBasis": [row for row in region.subspace_basis],
            "apexPoint": region.apex_point,
            "axis": region.axis,
            "halfAngle": region.half_angle,
        }
    if isinstance(region, DoubleWedge):
        return {
            "type": "doubleWedge",
            "h1": {"normal": region.h1.normal, "offset": region.h1.offset},
            "h2": {"normal": region.h2.normal, "offset": region.h2.offset},
        }
    if isinstance(region, DwFan):
        return {
            "type": "dwFan",
            "planeFrame": {"x": region.plane_frame.x, "y": region.plane_frame.y},
            "apexPoint": region.apex_point,
            "lineAngles": region.line_angles,
        }
    if isinstance(region, SlabPartition):
        return {"type": "slabs", "normal": region.normal, "offsets": region.offsets}
    if isinstance(region, Slab):
        return {
            "type": "slab",
            "normal": region.partition.normal,
            "offsets": region.partition.offsets,
            "index": region.index,
        }
    if isinstance(region, OrientedHyperplane):
        return {"type": "halfspace", "normal": region.normal, "offset": region.offset}
    raise TypeError(f"cannot serialize region type {type(region).__name__}")


def region_from_doc(doc):
    kind = doc.get("type")
    if kind == "kfan":
        frame = Frame2(doc["planeFrame"]["x"], doc["planeFrame"]["y"])
        return KFan(frame, doc["apexPoint"], doc["cutAngles"],
                    tuple(doc["sectorTargets"]) if "sectorTargets" in doc else None,
                    doc.get("sweepOffset"))
    if kind == "kcone":
        return KCone(doc["subspaceBasis"], doc["apexPoint"], doc["axis"], doc["halfAngle"])
    if kind == "doubleWedge":
        return DoubleWedge(
            OrientedHyperplane(doc["h1"]["normal"], doc["h1"]["offset"]),
            OrientedHyperplane(doc["h2"]["normal"], doc["h2"]["offset"]),
        )
    if kind == "dwFan":
        frame = Frame2(doc["planeFrame"]["x"], doc["planeFrame"]["y"])
        return DwFan(frame, doc["apexPoint"], doc["lineAngles"])
    if kind == "slabs":
        return SlabPartition(doc["normal"], doc["offsets"])
    if kind == "slab":
        return Slab(SlabPartition(doc["normal"], doc["offsets"]), int(doc["index"]))
    if kind == "halfspace":
        return OrientedHyperplane(doc["normal"], doc["offset"])
    raise TypeError(f"unknown region type {kind!r}")
