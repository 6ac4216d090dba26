"""Weighted point masses, measure evaluation, generators and instance I/O.

A mass distribution is a finite list of weighted atoms. Lower-dimensional
sets carry no mass for the continuous distributions these stand in for, so
two evaluation modes are provided: a raw mode where boundary atoms count
half (or raise, under the strict rule), and a smoothed mode where each atom
is spread over a small arc of directions as seen from the region's apex,
making measures continuous in the region parameters.
"""

from dataclasses import dataclass

import numpy as np

from . import jsonio
from .errors import DimensionMismatch, ParseError

DEFAULT_SMOOTHING = 1e-3  # radians


@dataclass(frozen=True)
class MassDistribution:
    points: np.ndarray
    weights: np.ndarray
    name: str = ""
    smoothing_radius: float = DEFAULT_SMOOTHING

    def __post_init__(self):
        p = np.atleast_2d(np.asarray(self.points, dtype=float))
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if p.shape[0] != w.shape[0]:
            raise DimensionMismatch(f"{p.shape[0]} atoms but {w.shape[0]} weights")
        if p.shape[0] == 0:
            raise ValueError("a mass distribution needs at least one atom")
        if np.any(w <= 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be positive and finite")
        if not np.all(np.isfinite(p)):
            raise ValueError("atom coordinates must be finite")
        object.__setattr__(self, "points", p)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "smoothing_radius", float(self.smoothing_radius))

    @property
    def dim(self):
        return self.points.shape[1]

    @property
    def size(self):
        return self.points.shape[0]

    @property
    def total(self):
        return float(np.sum(self.weights))

    def translated(self, offset):
        return MassDistribution(self.points + np.asarray(offset, dtype=float),
                                self.weights, self.name, self.smoothing_radius)

    def mapped(self, fn, name=None):
        """New distribution with positions fn(points), same weights."""
        return MassDistribution(fn(self.points), self.weights,
                                self.name if name is None else name, self.smoothing_radius)


@dataclass(frozen=True)
class Instance:
    dimension: int
    masses: tuple
    families: tuple = None

    def __post_init__(self):
        masses = tuple(self.masses)
        for mu in masses:
            if mu.dim != self.dimension:
                raise DimensionMismatch(
                    f"mass {mu.name!r} has dimension {mu.dim}, instance has {self.dimension}")
        fams = self.families
        if fams is not None:
            fams = tuple(tuple(int(i) for i in f) for f in fams)
            flat = [i for f in fams for i in f]
            if sorted(flat) != list(range(len(masses))):
                raise ValueError("families must partition the mass indices")
        object.__setattr__(self, "masses", masses)
        object.__setattr__(self, "families", fams)

    @property
    def m(self):
        return len(self.masses)

    def union(self, name="union"):
        """All atoms pooled into one distribution (weights kept)."""
        pts = np.vstack([mu.points for mu in self.masses])
        w = np.concatenate([mu.weights for mu in self.masses])
        return MassDistribution(pts, w, name, self.masses[0].smoothing_radius)

    def family_masses(self, j):
        return [self.masses[i] for i in self.families[j]]


def total_mass(mu):
    return mu.total


def region_measure(mu, region, eps=None, rule="half"):
    """Weighted membership sum; eps=None uses the mass's own smoothing
    radius, eps=0 is the raw measure under the given boundary rule."""
    if eps is None:
        eps = mu.smoothing_radius
    m = region.membership(mu.points, eps=eps, rule=rule)
    return float(mu.weights @ m)


# -- generators --------------------------------------------------------------

def _hyperplane_degenerate(pts, tol):
    """True when the d+1 rows lie within tol of a common hyperplane (smallest
    singular value of the centered coordinates)."""
    c = pts - pts.mean(axis=0)
    return np.linalg.svd(c, compute_uv=False)[-1] <= tol


def _collinear_triples_2d(pts, tol):
    """Triples within tol of a common line (perpendicular-distance test)."""
    n = pts.shape[0]
    bad = []
    for a in range(n - 2):
        u = pts[a + 1:] - pts[a]
        cross = np.abs(np.outer(u[:, 0], u[:, 1]) - np.outer(u[:, 1], u[:, 0]))
        base = np.maximum(np.linalg.norm(u, axis=1), 1e-300)
        dist = cross / base[:, None]  # dist[b, c]: c's distance from line (a, b)
        b_idx, c_idx = np.nonzero(np.triu(dist <= tol, k=1))
        bad.extend((a, a + 1 + b, a + 1 + c) for b, c in zip(b_idx, c_idx))
    return bad


def general_position_violations(points, tol=1e-9, max_checks=500_000, seed=0):
    """Subsets of d+1 points within tol of a common hyperplane.

    Exhaustive when the subset count fits the budget; the vectorized planar
    triple test is far cheaper per subset than the generic SVD test, so it
    gets a 40x larger budget. Past that, a seeded random sample of subsets
    (a spot check: random continuous draws are almost surely in general
    position).
    """
    from itertools import combinations
    from math import comb

    pts = np.asarray(points, dtype=float)
    n, d = pts.shape
    if n < d + 1:
        return []
    if d == 2 and comb(n, 3) <= 40 * max_checks:
        return _collinear_triples_2d(pts, tol)
    if comb(n, d + 1) <= max_checks:
        subsets = combinations(range(n), d + 1)
    else:
        rng = np.random.default_rng(seed)
        subsets = (tuple(rng.choice(n, size=d + 1, replace=False)) for _ in range(max_checks))
    bad = []
    for sub in subsets:
        if _hyperplane_degenerate(pts[list(sub)], tol):
            bad.append(tuple(sub))
    return bad


def random_instance(d, m, atoms_per_mass, seed, smoothing=DEFAULT_SMOOTHING):
    """Deterministic instance: atoms i.i.d. in the unit cube, unit weights,
    general position enforced by redrawing offending atoms."""
    if d < 1 or m < 1 or atoms_per_mass < 1:
        raise ValueError("d, m and atoms_per_mass must be positive")
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0.0, 1.0, size=(m * atoms_per_mass, d))
    for _ in range(64):
        bad = general_position_violations(pts, tol=1e-9)
        if not bad:
            break
        redraw = sorted({i for sub in bad for i in sub})
        pts[redraw] = rng.uniform(0.0, 1.0, size=(len(redraw), d))
    else:
        raise RuntimeError("could not reach general position after 64 redraws")
    masses = [
        MassDistribution(pts[i * atoms_per_mass:(i + 1) * atoms_per_mass],
                         np.ones(atoms_per_mass), f"m{i + 1}", smoothing)
        for i in range(m)
    ]
    return Instance(d, masses)


def _cluster(center, radius, weight, n=3):
    """Deterministic tight cluster: n atoms within `radius` of center, total
    weight as given. In d >= 2 the atoms sit on a circle in the first two
    coordinates (full-dimensional cluster footprint); on the line they spread
    evenly over [-radius/2, radius/2]."""
    center = np.asarray(center, dtype=float)
    d = center.shape[0]
    offs = np.zeros((n, d))
    if d == 1:
        offs[:, 0] = np.linspace(-0.5, 0.5, n) * radius
    else:
        ang = np.pi / 2 + 2 * np.pi * np.arange(n) / n
        offs[:, 0] = 0.5 * radius * np.cos(ang)
        offs[:, 1] = 0.5 * radius * np.sin(ang)
    return center[None, :] + offs, np.full(n, weight / n)


def make_simplex_counterexample(d, smoothing=DEFAULT_SMOOTHING):
    """d+2 point-like unit masses: the standard simplex vertices
    {0, e_1, ..., e_d} plus the barycenter. No wedge (or cone) bisects all of
    them at once, which drives the tightness certificates."""
    if d < 1:
        raise ValueError("d must be at least 1")
    vertices = [np.zeros(d)] + [np.eye(d)[i] for i in range(d)]
    centers = vertices + [np.mean(vertices, axis=0)]
    names = [f"v{i}" for i in range(d + 1)] + ["bary"]
    masses = []
    for c, name in zip(centers, names):
        pts, w = _cluster(c, 1e-3, 1.0)
        masses.append(MassDistribution(pts, w, name, smoothing))
    return Instance(d, masses)


def make_projective_tight_instance(d, n, seed=0, smoothing=DEFAULT_SMOOTHING):
    """d+1 families, each of d+1 point sets of n clustered points, with no
    d+1 of the (d+1)^2 cluster centers within 1e-2 of a common hyperplane
    (seeded rejection)."""
    from itertools import combinations

    if d < 1 or n < 2 or n % 2:
        raise ValueError("need d >= 1 and even n >= 2")
    rng = np.random.default_rng(seed)
    n_clusters = (d + 1) ** 2
    for _ in range(256):
        centers = rng.uniform(0.0, 1.0, size=(n_clusters, d))
        ok = all(
            not _hyperplane_degenerate(centers[list(sub)], 1e-2)
            for sub in combinations(range(n_clusters), d + 1)
        )
        if ok:
            break
    else:
        raise RuntimeError("could not place clusters away from common hyperplanes")
    masses = []
    families = []
    idx = 0
    for f in range(d + 1):
        fam = []
        for s in range(d + 1):
            base = centers[f * (d + 1) + s]
            # n points inside a 1e-3 ball, deterministic given the rng state
            pts = base[None, :] + rng.uniform(-1, 1, size=(n, d)) * 1e-3 / np.sqrt(d) / 2
            masses.append(MassDistribution(pts, np.ones(n), f"f{f + 1}s{s + 1}", smoothing))
            fam.append(idx)
            idx += 1
        families.append(fam)
    return Instance(d, masses, families)


# -- instance files ----------------------------------------------------------

def instance_to_doc(inst):
    doc = {
        "dimension": inst.dimension,
        "masses": [
            {"name": mu.name, "atoms": [row for row in mu.points], "weights": mu.weights}
            for mu in inst.masses
        ],
    }
    if inst.families is not None:
        doc["families"] = [list(f) for f in inst.families]
    return doc


def instance_from_doc(doc, smoothing=DEFAULT_SMOOTHING):
    d = jsonio.field(doc, "dimension", int)
    raw_masses = jsonio.field(doc, "masses", list)
    if not raw_masses:
        raise ParseError("field 'masses' must be a non-empty list")
    masses = []
    for i, entry in enumerate(raw_masses):
        if not isinstance(entry, dict):
            raise ParseError(f"masses[{i}] is not an object")
        name = entry.get("name", f"m{i + 1}")
        atoms = entry.get("atoms")
        weights = entry.get("weights")
        if atoms is None or weights is None:
            raise ParseError(f"masses[{i}] needs 'atoms' and 'weights'")
        pts = np.asarray(atoms, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != d:
            raise DimensionMismatch(
                f"masses[{i}].atoms: expected shape (n, {d}), got {pts.shape}")
        if len(weights) != pts.shape[0]:
            raise ParseError(f"masses[{i}]: {pts.shape[0]} atoms but {len(weights)} weights")
        masses.append(MassDistribution(pts, np.asarray(weights, dtype=float), name, smoothing))
    families = doc.get("families")
    return Instance(d, masses, families)


def save_instance(path, inst):
    with open(path, "w") as fh:
        fh.write(jsonio.dumps(instance_to_doc(inst)))
        fh.write("\n")


def load_instance(path, smoothing=DEFAULT_SMOOTHING):
    with open(path) as fh:
        text = fh.read()
    return instance_from_doc(jsonio.loads(text, what=str(path)), smoothing)
