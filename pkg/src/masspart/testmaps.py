"""Residual maps whose zeros are the partitions we search for, the cyclic
block action on them, equivariance / antipodality checkers, and feasibility
predicates for each guarantee.

Residual components are mass fractions (each mass normalized by its own
total), so every tolerance in this module is scale free. The infinity norm
is the canonical residual magnitude: a partition is simultaneous exactly
when the worst component is small.

The antipodality identities (flipping a cone axis or one wedge hyperplane
negates the residual) hold bit for bit, not merely within tolerance: each
map evaluates a canonically oriented representative and reattaches the sign
afterwards, so both orientations share every intermediate float.
"""

from dataclasses import dataclass

import numpy as np

from .errors import BlockMismatch, DimensionMismatch
from .geometry import (Frame2, OrientedFlag, OrientedHyperplane,
                       canonical_sign, require_unit)
from .masses import region_measure
from .regions import (DoubleWedge, KFan, build_bisecting_cone,
                      build_equipartition_fan, complement)

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class ResidualVector:
    """Concatenated residual blocks, one block per tested mass."""

    components: np.ndarray
    block_structure: tuple

    def __post_init__(self):
        c = np.asarray(self.components, dtype=float).ravel()
        bs = tuple(int(b) for b in self.block_structure)
        if any(b <= 0 for b in bs) or sum(bs) != c.shape[0]:
            raise BlockMismatch(
                f"block structure {bs} does not tile {c.shape[0]} components")
        object.__setattr__(self, "components", c)
        object.__setattr__(self, "block_structure", bs)

    def blocks(self):
        edges = np.concatenate([[0], np.cumsum(self.block_structure)]).astype(int)
        return [self.components[a:b] for a, b in zip(edges[:-1], edges[1:])]

    def block_sums(self):
        return np.array([float(np.sum(b)) for b in self.blocks()])

    def max_abs(self):
        return float(np.max(np.abs(self.components))) if self.components.size else 0.0


_CONFIG_KINDS = ("angle", "direction", "stiefelPair", "flag",
                 "hyperplanePair", "apexParam")


@dataclass(frozen=True)
class ConfigPoint:
    """Tagged point of a solver configuration space.

    kind        payload
    ----        -------
    angle           float
    direction       unit vector
    stiefelPair     Frame2 (ordered orthonormal pair)
    flag            OrientedFlag
    hyperplanePair  (unit normal, unit normal)
    apexParam       (parameter t along a line, unit direction)
    """

    kind: str
    payload: object

    def __post_init__(self):
        k, p = self.kind, self.payload
        if k == "angle":
            object.__setattr__(self, "payload", float(p))
        elif k == "direction":
            object.__setattr__(self, "payload", require_unit(p, "direction"))
        elif k == "stiefelPair":
            if not isinstance(p, Frame2):
                raise TypeError("stiefelPair payload must be a Frame2")
        elif k == "flag":
            if not isinstance(p, OrientedFlag):
                raise TypeError("flag payload must be an OrientedFlag")
        elif k == "hyperplanePair":
            h1, h2 = p
            object.__setattr__(
                self, "payload",
                (require_unit(h1, "first normal"), require_unit(h2, "second normal")))
        elif k == "apexParam":
            t, direction = p
            object.__setattr__(
                self, "payload", (float(t), require_unit(direction, "direction")))
        else:
            raise ValueError(f"unknown configuration kind {k!r}; "
                             f"expected one of {_CONFIG_KINDS}")


# -- fan residual ---------------------------------------------------------------

def _frame_of(cfg):
    if isinstance(cfg, ConfigPoint):
        if cfg.kind != "stiefelPair":
            raise TypeError(f"expected a stiefelPair configuration, got {cfg.kind!r}")
        return cfg.payload
    return cfg


def fan_for_config(inst, cfg, k, targets=None, ref_index=None, start_angle=0.0):
    """The fan scored by fan_residual: an equipartition of the reference
    mass (the pooled union when ref_index is None) swept from start_angle in
    the plane of cfg, apex flat through the origin."""
    frame = _frame_of(cfg)
    if frame.dim != inst.dimension:
        raise DimensionMismatch("configuration plane does not match the instance dimension")
    t = np.full(k, 1.0 / k) if targets is None else np.asarray(targets, dtype=float)
    if t.shape[0] != k:
        raise ValueError("need exactly k targets")
    ref = inst.union() if ref_index is None else inst.masses[ref_index]
    return build_equipartition_fan(frame, np.zeros(inst.dimension), ref, t, start_angle)


def _residual_for_fan(inst, fan, ref_index, eps):
    k = fan.k
    # sorted sectors are cyclically consecutive in the sweep, so the sector
    # beginning at cut_angles[i] fills component slot (sweep_offset + i) % k
    slots = (fan.sweep_offset + np.arange(k)) % k
    st = np.asarray(fan.sector_targets)
    blocks = []
    for i, mu in enumerate(inst.masses):
        if ref_index is not None and i == ref_index:
            continue
        comp = np.empty(k)
        comp[slots] = fan.measures(mu, eps=eps) / mu.total - st
        blocks.append(comp)
    flat = np.concatenate(blocks) if blocks else np.zeros(0)
    return ResidualVector(flat, (k,) * len(blocks))


def fan_residual(inst, cfg, k, targets=None, ref_index=None, eps=None, start_angle=0.0):
    """Per-mass sector imbalances of the reference-equipartition fan.

    Block i holds mu_i(W_j)/total_i - targets_j for j = 1..k in the sweep
    order of the construction. The reference mass is skipped when ref_index
    names one (its block vanishes by construction); with ref_index None every
    mass is scored against the pooled reference, which has the same zero set.
    Raises DegenerateProjection when the reference mass concentrates on the
    apex flat or in a single direction.
    """
    fan = fan_for_config(inst, cfg, k, targets, ref_index, start_angle)
    return _residual_for_fan(inst, fan, ref_index, eps)


# -- cone residual --------------------------------------------------------------

def cone_residual(inst, flag, apex_point, eps=None):
    """Signed bisection defects of the total-mass-bisecting cone on a flag.

    The cone is built with the flag's line in canonical orientation and the
    result is reconstructed by oddness, so flipping the line negates the
    residual exactly. Components cover every mass but the last: the cone
    bisects the pooled mass by construction, so a zero vector certifies that
    the last mass is bisected as well. Raises NoBisection when no half-angle
    reaches half the pooled mass.
    """
    if flag.dim != inst.dimension:
        raise DimensionMismatch("flag does not match the instance dimension")
    apex = np.asarray(apex_point, dtype=float)
    s = canonical_sign(flag.line)
    cone = build_bisecting_cone(flag if s > 0 else flag.flipped_line(), apex, inst.union())
    cbar = complement(cone)
    comps = np.empty(inst.m - 1)
    for i, mu in enumerate(inst.masses[:-1]):
        comps[i] = (region_measure(mu, cone, eps=eps)
                    - region_measure(mu, cbar, eps=eps)) / mu.total
    return ResidualVector(s * comps, (1,) * (inst.m - 1))


# -- double-wedge residual --------------------------------------------------------

def dw_residual(family, h1, h2, eps=None):
    """Per-mass double-wedge imbalance for hyperplane normals through the
    origin: components are (mu(D) - mu(complement))/total.

    Both normals are canonicalized and the sign product reattached, so
    dw_residual(-h1, h2) == dw_residual(h1, -h2) == -dw_residual(h1, h2)
    holds bit for bit.
    """
    a1 = require_unit(h1, "first normal")
    a2 = require_unit(h2, "second normal")
    if a1.shape != a2.shape:
        raise DimensionMismatch("hyperplane normals live in different dimensions")
    for mu in family:
        if mu.dim != a1.shape[0]:
            raise DimensionMismatch("mass dimension does not match the normals")
    s1 = canonical_sign(a1)
    s2 = canonical_sign(a2)
    dw = DoubleWedge(OrientedHyperplane(s1 * a1, 0.0), OrientedHyperplane(s2 * a2, 0.0))
    dbar = complement(dw)
    comps = np.array([
        (region_measure(mu, dw, eps=eps) - region_measure(mu, dbar, eps=eps)) / mu.total
        for mu in family])
    return ResidualVector((s1 * s2) * comps, (1,) * len(family))


# -- cyclic action ---------------------------------------------------------------

def zk_shift(v, shift):
    """Cyclic rotation of each k-block: shift 1 sends (a, b, c) to (c, a, b).

    Shifts are taken mod k, so shift k is the identity and shifts compose
    additively. On a labeled fan the geometry is untouched and the labels
    advance: sweep_offset grows by the shift and sector_targets roll along.
    """
    shift = int(shift)
    if isinstance(v, ResidualVector):
        bs = v.block_structure
        if not bs:
            return v
        k = bs[0]
        if any(b != k for b in bs):
            raise BlockMismatch(f"blocks {bs} are not all the same size")
        rolled = [np.roll(b, shift % k) for b in v.blocks()]
        return ResidualVector(np.concatenate(rolled), bs)
    if isinstance(v, KFan):
        if v.sector_targets is None or v.sweep_offset is None:
            raise BlockMismatch("fan carries no sweep labeling to shift")
        k = v.k
        st = tuple(np.roll(np.asarray(v.sector_targets), -(shift % k)))
        return KFan(v.plane_frame, v.apex_point, v.cut_angles, st,
                    (v.sweep_offset + shift) % k)
    raise TypeError(f"cannot shift {type(v).__name__}")


# -- equivariance ----------------------------------------------------------------

@dataclass(frozen=True)
class EquivarianceReport:
    max_deviation: float
    passed: bool


def check_equivariance(inst, cfg, k, tol=1e-8, ref_index=None, eps=None):
    """Restart the equal-split sweep at each of the fan's own cuts and
    compare residuals against the cyclically shifted original.

    Advancing the start to the s-th sweep cut makes the old W_{1+s} the new
    W_1, which shifts residual blocks by k - s. Only the equal split is
    checked: unequal targets are not preserved by the relabeling.
    """
    fan0 = fan_for_config(inst, cfg, k, None, ref_index, 0.0)
    r0 = _residual_for_fan(inst, fan0, ref_index, eps)
    dev = 0.0
    for s in range(1, k):
        start = float(fan0.cut_angles[(s - fan0.sweep_offset) % k])
        fan_s = fan_for_config(inst, cfg, k, None, ref_index, start)
        r_s = _residual_for_fan(inst, fan_s, ref_index, eps)
        want = zk_shift(r0, (k - s) % k)
        if r_s.components.size:
            dev = max(dev, float(np.max(np.abs(r_s.components - want.components))))
    return EquivarianceReport(dev, dev <= tol)


# -- feasibility -----------------------------------------------------------------

@dataclass(frozen=True)
class Feasibility:
    ok: bool
    explanation: str

    def __bool__(self):
        return self.ok


def _prime_factors(k):
    fs = {}
    n, p = k, 2
    while p * p <= n:
        while n % p == 0:
            fs[p] = fs.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        fs[n] = fs.get(n, 0) + 1
    return fs


def _distinct_odd_primes(k):
    if k < 3:
        return False, f"k = {k} is not a product of odd primes (k >= 3 required)"
    fs = _prime_factors(k)
    parts = "*".join(str(p) for p in sorted(fs) for _ in range(fs[p]))
    if 2 in fs:
        return False, f"k = {k} = {parts} is even; every prime factor must be odd"
    if any(e > 1 for e in fs.values()):
        return False, (f"k = {k} = {parts} repeats a prime factor; "
                       "factors must be pairwise distinct")
    return True, parts


def _odd_prime(k):
    if k < 3 or k % 2 == 0 or _prime_factors(k) != {k: 1}:
        return False, f"k = {k} is not an odd prime"
    return True, str(k)


def _ineq(name, lhs_desc, lhs, m, k):
    rhs = m * (k - 1)
    if lhs >= rhs:
        return True, f"{lhs_desc} = {lhs} >= m(k-1) = {rhs}"
    return False, f"{lhs_desc} = {lhs} < m(k-1) = {rhs} fails for {name}"


def feasibility(d, k, m, variant):
    """Whether the guarantee named by `variant` covers the requested sizes.

    Conventions follow the guarantees themselves. Fan and stripe variants
    partition m+1 masses into k parts; for the qfan variants k is the prime
    subdivision count p (the fan may have fewer sectors, grouped from p equal
    ones, which the solver checks against the actual target list). Cone
    variants bisect m+1 masses with a k-cone. For dw_shared, k is the number
    of families sharing the first hyperplane and m the number of masses per
    family.
    """
    for name, val in (("d", d), ("k", k), ("m", m)):
        if int(val) != val or val < 1:
            raise ValueError(f"{name} must be a positive integer")
    d, k, m = int(d), int(k), int(m)

    if variant in ("fan_origin", "fan_general", "stripes"):
        ok, note = _distinct_odd_primes(k)
        if not ok:
            return Feasibility(False, note)
        if variant == "fan_origin":
            ok, ineq = _ineq(variant, "2d-3", 2 * d - 3, m, k)
        else:
            ok, ineq = _ineq(variant, "2d-1", 2 * d - 1, m, k)
        return Feasibility(ok, f"{ineq}; k = {note} is a product of "
                               "pairwise distinct odd primes")

    if variant in ("qfan_origin", "qfan_general"):
        ok, note = _odd_prime(k)
        if not ok:
            return Feasibility(False, note)
        if variant == "qfan_origin":
            ok, ineq = _ineq(variant, "2d-2", 2 * d - 2, m, k)
        else:
            ok, ineq = _ineq(variant, "2d", 2 * d, m, k)
        return Feasibility(ok, f"{ineq}; subdivision count k = {k} is an odd prime")

    if variant == "cone":
        if k > d:
            return Feasibility(False, f"k = {k} exceeds the dimension d = {d}")
        limit = d if k >= 2 else d - 1
        kind = f"a {k}-cone" if k >= 2 else "a halfspace (the k = 1 cone)"
        if m > limit:
            return Feasibility(False, f"{m}+1 masses exceed the {limit}+1 "
                                      f"bisected by {kind} in dimension {d}")
        return Feasibility(True, f"{m}+1 masses <= {limit}+1 bisected by {kind}")

    if variant == "cone_apex_point":
        if k > d:
            return Feasibility(False, f"k = {k} exceeds the dimension d = {d}")
        limit = d - 1 if k >= 2 else d - 2
        if m > limit:
            return Feasibility(False, f"{m}+1 masses exceed the {limit}+1 bisected "
                                      "by a cone with prescribed apex")
        return Feasibility(True, f"{m}+1 masses <= {limit}+1 bisected by a cone "
                                 "with prescribed apex")

    if variant == "cone_apex_line":
        if d % 2 == 0:
            return Feasibility(False, f"d = {d} must be odd to pin the apex to a line")
        if k != d:
            return Feasibility(False, f"apex-on-line bisection needs k = d, got k = {k}")
        if m > d:
            return Feasibility(False, f"{m}+1 masses exceed the d+1 = {d + 1} "
                                      "bisected by a d-cone with apex on a line")
        return Feasibility(True, f"d = {d} odd, k = d, {m}+1 masses <= {d + 1}")

    if variant == "dw_shared":
        if d % 2 == 0:
            return Feasibility(False, f"d = {d} must be odd for shared-hyperplane "
                                      "double wedges")
        if k > d - 1:
            return Feasibility(False, f"{k} families exceed the d-1 = {d - 1} "
                                      "that can share a hyperplane")
        if m > d:
            return Feasibility(False, f"{m} masses per family exceed d = {d}")
        return Feasibility(True, f"d = {d} odd, {k} families <= {d - 1}, "
                                 f"{m} masses per family <= {d}")

    raise ValueError(f"unknown feasibility variant {variant!r}")
