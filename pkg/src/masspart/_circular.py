"""Piecewise-linear mass CDFs on a segment or a circle.

Atoms are either point masses (eps = 0) or smeared uniformly over an arc of
length eps centered at their position. Quantile queries invert the CDF; when
the target value is attained on a plateau (a gap in the support) the plateau
midpoint is returned, and on the circle the terminal plateau is continued
past the seam so the answer does not depend on where the window was cut.
"""

import numpy as np

from .errors import NoBisection


class PiecewiseCDF:
    """Nondecreasing piecewise-linear function on [xs[0], xs[-1]].

    Repeated breakpoints carry jumps, so step functions (point atoms) use the
    same representation. Values are right-continuous at jumps.
    """

    def __init__(self, xs, cum):
        xs = np.asarray(xs, dtype=float)
        cum = np.asarray(cum, dtype=float)
        if xs.shape != cum.shape or xs.ndim != 1 or xs.shape[0] < 2:
            raise ValueError("breakpoints and values must be 1-d arrays of equal length >= 2")
        if np.any(np.diff(xs) < 0) or np.any(np.diff(cum) < 0):
            raise ValueError("breakpoints and values must be nondecreasing")
        self.xs = xs
        self.cum = cum

    @classmethod
    def from_ramps(cls, lo, hi, starts, stops, slopes, base=0.0):
        """Sum of ramps: density `slopes[i]` on [starts[i], stops[i]] c [lo, hi]."""
        starts = np.asarray(starts, dtype=float)
        stops = np.asarray(stops, dtype=float)
        slopes = np.asarray(slopes, dtype=float)
        xs = np.unique(np.concatenate([[lo, hi], starts, stops]))
        d = np.zeros(xs.shape[0] + 1)
        np.add.at(d, np.searchsorted(xs, starts), slopes)
        np.add.at(d, np.searchsorted(xs, stops), -slopes)
        dens = np.clip(np.cumsum(d)[:-2], 0.0, None)  # fp cancellation guard
        masses = dens * np.diff(xs)
        cum = base + np.concatenate([[0.0], np.cumsum(masses)])
        return cls(xs, cum)

    @classmethod
    def from_jumps(cls, lo, hi, positions, weights, base=0.0):
        """Step function: jump of weights[i] at positions[i] in [lo, hi]."""
        positions = np.asarray(positions, dtype=float)
        weights = np.asarray(weights, dtype=float)
        order = np.argsort(positions, kind="stable")
        p, w = positions[order], weights[order]
        after = base + np.cumsum(w)
        before = np.concatenate([[base], after[:-1]])
        xs = np.concatenate([[lo], np.repeat(p, 2), [hi]])
        cum = np.concatenate([[base], np.column_stack([before, after]).ravel(), [after[-1] if w.size else base]])
        return cls(xs, cum)

    @property
    def total(self):
        return float(self.cum[-1])

    def value(self, t):
        t = np.asarray(t, dtype=float)
        single = t.ndim == 0
        tt = np.atleast_1d(t)
        idx = np.clip(np.searchsorted(self.xs, tt, side="right") - 1, 0, self.xs.shape[0] - 2)
        width = self.xs[idx + 1] - self.xs[idx]
        rise = self.cum[idx + 1] - self.cum[idx]
        frac = np.divide(tt - self.xs[idx], width, out=np.zeros_like(tt), where=width > 0)
        v = self.cum[idx] + rise * np.clip(frac, 0.0, 1.0)
        v = np.where(tt >= self.xs[-1], self.cum[-1], np.where(tt <= self.xs[0], self.cum[0], v))
        return float(v[0]) if single else v

    def level_set(self, c):
        """Closed interval [t_lo, t_hi] where the function equals c.

        For c attained at a single point both ends coincide; a query inside a
        jump returns the jump location twice. Targets within rounding noise
        (1e-12 relative) of an attained breakpoint value snap onto it, so
        that plateau hits are not missed to cumulative-sum roundoff. Raises
        NoBisection when c is outside [F(lo), F(hi)].
        """
        c = float(c)
        snap = 1e-12 * max(1.0, abs(self.cum[-1]))
        i = int(np.searchsorted(self.cum, c, side="left"))
        near = [self.cum[j] for j in (i - 1, i) if 0 <= j < self.cum.shape[0]]
        if near:
            v = min(near, key=lambda u: abs(c - u))
            if abs(c - v) <= snap:
                c = float(v)
        if c < self.cum[0] or c > self.cum[-1]:
            raise NoBisection(f"target {c!r} outside attained range [{self.cum[0]!r}, {self.cum[-1]!r}]")
        i = int(np.searchsorted(self.cum, c, side="left"))
        if self.cum[i] == c:
            t_lo = self.xs[i]
        else:
            width = self.xs[i] - self.xs[i - 1]
            rise = self.cum[i] - self.cum[i - 1]
            t_lo = self.xs[i] if width == 0.0 else self.xs[i - 1] + (c - self.cum[i - 1]) * width / rise
        j = int(np.searchsorted(self.cum, c, side="right")) - 1
        if self.cum[j] == c:
            t_hi = self.xs[j]
        else:
            width = self.xs[j + 1] - self.xs[j]
            rise = self.cum[j + 1] - self.cum[j]
            t_hi = self.xs[j + 1] if width == 0.0 else self.xs[j] + (c - self.cum[j]) * width / rise
        return float(t_lo), float(t_hi)

    def quantile(self, c):
        """Plateau-midpoint inverse (no wrap: plain interval semantics)."""
        t_lo, t_hi = self.level_set(c)
        return 0.5 * (t_lo + t_hi)


def _arc_pieces(x, eps, period):
    """Split the arc [x - eps/2, x + eps/2] into pieces inside [0, period]."""
    a = x - 0.5 * eps
    b = x + 0.5 * eps
    starts, stops = [a], [b]
    if a < 0.0:
        starts, stops = [0.0, a + period], [b, period]
    elif b > period:
        starts, stops = [0.0, a], [b - period, period]
    return starts, stops


class CircularCDF:
    """F(t) = mass of the arc [start, start + t), 0 <= t <= period."""

    def __init__(self, angles, weights, period=2.0 * np.pi, start=0.0, eps=0.0):
        angles = np.atleast_1d(np.asarray(angles, dtype=float))
        weights = np.atleast_1d(np.asarray(weights, dtype=float))
        if angles.shape != weights.shape:
            raise ValueError("angles and weights must have matching shapes")
        if np.any(weights <= 0):
            raise ValueError("weights must be positive")
        if eps < 0 or eps >= 0.5 * period:
            raise ValueError(f"smoothing width {eps!r} must lie in [0, period/2)")
        self.period = float(period)
        self.start = float(start)
        self.eps = float(eps)
        x = np.mod(angles - start, period)
        if eps == 0.0:
            self._plf = PiecewiseCDF.from_jumps(0.0, period, x, weights)
        else:
            starts, stops, slopes = [], [], []
            for xi, wi in zip(x, weights):
                s, t = _arc_pieces(xi, eps, period)
                starts += s
                stops += t
                slopes += [wi / eps] * len(s)
            self._plf = PiecewiseCDF.from_ramps(0.0, period, starts, stops, slopes)

    @property
    def total(self):
        return self._plf.total

    def value(self, t):
        return self._plf.value(t)

    def quantile(self, c):
        """Inverse CDF with plateau midpoints, 0 < c <= total.

        The terminal plateau (c == total) continues across the seam into the
        leading gap, so the returned position may exceed the period by up to
        that gap; reduce mod period for an absolute angle.
        """
        c = float(c)
        if c <= 0.0:
            raise NoBisection(f"cumulative target {c!r} must be positive")
        t_lo, t_hi = self._plf.level_set(c)
        if t_hi >= self.period:
            # the terminal plateau: continue it into the leading gap
            _, gap = self._plf.level_set(0.0)
            t_hi = self.period + gap
        return 0.5 * (t_lo + t_hi)

    def equipartition_cuts(self, fractions):
        """Cut positions (relative to start, increasing) splitting the mass
        into consecutive arcs with the given fractions. The last cumulative
        target is pinned to the exact total."""
        f = np.asarray(fractions, dtype=float)
        cs = np.cumsum(f) * self.total
        cs[-1] = self.total
        return np.array([self.quantile(c) for c in cs])


def polar_cap_cdf(psi, weights, eps=0.0):
    """CDF of mass within polar angle alpha of an axis, alpha in [0, pi].

    Atoms at polar angle psi enter with weight ramping linearly over
    [psi - eps/2, psi + eps/2] (point jumps when eps = 0). Ramp parts below 0
    count as already inside at alpha = 0; parts above pi never accumulate, so
    the attained maximum can fall short of the total weight.
    """
    psi = np.atleast_1d(np.asarray(psi, dtype=float))
    weights = np.atleast_1d(np.asarray(weights, dtype=float))
    if eps == 0.0:
        return PiecewiseCDF.from_jumps(0.0, np.pi, psi, weights)
    lo = psi - 0.5 * eps
    hi = psi + 0.5 * eps
    base = float(np.sum(weights * np.clip(-lo / eps, 0.0, 1.0)))
    starts = np.clip(lo, 0.0, np.pi)
    stops = np.clip(hi, 0.0, np.pi)
    keep = stops > starts
    return PiecewiseCDF.from_ramps(
        0.0, np.pi, starts[keep], stops[keep], (weights / eps)[keep], base=base
    )
