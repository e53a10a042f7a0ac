"""Counting statistics over packings: threshold series, power-law fits,
region-restricted counts and prime-curvature sieve counts."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import EmptyDenominator, InsufficientData, InvalidInput


@dataclass(frozen=True)
class CountSeries:
    """Monotone table of ``(threshold, count)`` pairs."""

    t: np.ndarray
    n: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        n = np.asarray(self.n, dtype=np.int64)
        if t.shape != n.shape or t.ndim != 1:
            raise InvalidInput("thresholds and counts must be 1-d arrays of equal length")
        if len(t) > 1 and not np.all(np.diff(t) > 0):
            raise InvalidInput("thresholds must be strictly increasing")
        if len(n) > 1 and not np.all(np.diff(n) >= 0):
            raise InvalidInput("counts must be nondecreasing")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "n", n)

    def __len__(self):
        return len(self.t)

    def at(self, t: float) -> int:
        i = np.searchsorted(self.t, t, side="right") - 1
        return int(self.n[i]) if i >= 0 else 0


def count_series(values, thresholds) -> CountSeries:
    """``n(t) = #{v <= t}`` on the given thresholds."""
    v = np.sort(np.asarray(values, dtype=float))
    thresholds = np.asarray(thresholds, dtype=float)
    return CountSeries(thresholds, np.searchsorted(v, thresholds, side="right"))


def dyadic_grid(lo: float, hi: float, per_octave: int = 4) -> np.ndarray:
    """Geometric grid from ``lo`` to ``hi`` (inclusive) with ``per_octave`` steps per doubling."""
    steps = int(round(math.log2(hi / lo) * per_octave))
    return lo * 2.0 ** (np.arange(steps + 1) / per_octave)


def circle_count_series(run, thresholds) -> CountSeries:
    """``N(t) = #{C : rad(C) >= 1/t}`` for a packing run (curvature thresholds)."""
    return count_series(np.abs(run.k), thresholds)


def default_window(t_max: float) -> tuple[float, float]:
    """Top three octaves of the data, minus the top half-octave."""
    return t_max * 2.0 ** -3.5, t_max * 2.0 ** -0.5


def _ols(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    dof = len(x) - 2
    sxx = np.sum((x - x.mean()) ** 2)
    if dof > 0 and sxx > 0:
        stderr = math.sqrt(float(resid @ resid) / dof / sxx)
    else:
        stderr = 0.0
    return float(coef[0]), float(coef[1]), stderr


def fit_power_law(series: CountSeries, window=None, min_points: int = 10) -> tuple[float, float]:
    """Least-squares slope of ``log n`` against ``log t`` inside ``window``.

    Returns ``(exponent, stderr)``.
    """
    if window is None:
        window = default_window(series.t[-1])
    lo, hi = window
    sel = (series.t >= lo * (1 - 1e-12)) & (series.t <= hi * (1 + 1e-12))
    t, n = series.t[sel], series.n[sel]
    if len(t) < min_points:
        raise InsufficientData(f"{len(t)} points in window {window}, need {min_points}")
    if np.any(n <= 0):
        raise InsufficientData("zero counts inside the fit window")
    slope, _, stderr = _ols(np.log(t), np.log(n))
    return slope, stderr


# --------------------------------------------------------------------------
# Regions

@dataclass(frozen=True)
class Region:
    """A closed disk ``kind='disk'`` (center, radius) or axis-aligned rectangle
    ``kind='rect'`` (x-range, y-range)."""

    kind: str
    center: complex = 0j
    radius: float = 0.0
    xrange: tuple[float, float] = (0.0, 0.0)
    yrange: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.kind == "disk":
            if not self.radius > 0:
                raise InvalidInput("disk radius must be positive")
        elif self.kind == "rect":
            if not (self.xrange[1] > self.xrange[0] and self.yrange[1] > self.yrange[0]):
                raise InvalidInput("rectangle must have positive area")
        else:
            raise InvalidInput(f"unknown region kind {self.kind!r}")

    @classmethod
    def disk(cls, center: complex, radius: float) -> "Region":
        return cls("disk", center=complex(center), radius=float(radius))

    @classmethod
    def rect(cls, x0: float, x1: float, y0: float, y1: float) -> "Region":
        return cls("rect", xrange=(float(x0), float(x1)), yrange=(float(y0), float(y1)))

    def mirror_x(self) -> "Region":
        """Image under ``z -> -conj(z)``."""
        if self.kind == "disk":
            return Region.disk(complex(-self.center.real, self.center.imag), self.radius)
        return Region.rect(-self.xrange[1], -self.xrange[0], *self.yrange)

    def meets(self, centers, radii) -> np.ndarray:
        """Whether each circle (as a curve) meets the closed region."""
        centers = np.asarray(centers, dtype=complex)
        radii = np.asarray(radii, dtype=float)
        x, y = centers.real, centers.imag
        if self.kind == "disk":
            d = np.hypot(x - self.center.real, y - self.center.imag)
            return np.abs(d - radii) <= self.radius
        (x0, x1), (y0, y1) = self.xrange, self.yrange
        dx_near = np.maximum(np.maximum(x0 - x, x - x1), 0.0)
        dy_near = np.maximum(np.maximum(y0 - y, y - y1), 0.0)
        near = np.hypot(dx_near, dy_near)
        far = np.hypot(np.maximum(np.abs(x - x0), np.abs(x - x1)),
                       np.maximum(np.abs(y - y0), np.abs(y - y1)))
        return (near <= radii) & (radii <= far)


def region_count(run, region: Region, t: float) -> int:
    """Number of circles with curvature at most ``t`` whose locus meets ``region``."""
    keep = np.abs(run.k) <= t
    return int(np.count_nonzero(region.meets(run.centers[keep], run.radii[keep])))


def equidistribution_ratio(run, r1: Region, r2: Region, t: float) -> float:
    den = region_count(run, r2, t)
    if den == 0:
        raise EmptyDenominator("no circles meet the denominator region")
    return region_count(run, r1, t) / den


# --------------------------------------------------------------------------
# Sieve

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for ``n < 3.3e24``."""
    n = int(n)
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int, rng: random.Random) -> int:
    if n % 2 == 0:
        return 2
    while True:
        c = rng.randrange(1, n)
        f = lambda x: (x * x + c) % n  # noqa: E731
        x = y = rng.randrange(2, n)
        d = 1
        while d == 1:
            x = f(x)
            y = f(f(y))
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d


def prime_factor_count(n: int, trial_limit: int = 1000) -> int:
    """Number of prime factors of ``|n|`` counted with multiplicity (``Omega``)."""
    n = abs(int(n))
    if n < 2:
        return 0
    count = 0
    p = 2
    while p <= trial_limit and p * p <= n:
        while n % p == 0:
            n //= p
            count += 1
        p += 1 if p == 2 else 2
    if n == 1:
        return count
    rng = random.Random(n)
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            count += 1
            continue
        d = _pollard_rho(m, rng)
        stack.extend((d, m // d))
    return count


@dataclass
class SieveReport:
    T: int
    prime_count: int
    almost_prime_counts: dict[int, int] = field(default_factory=dict)
    delta_used: float = 1.3057

    @property
    def normalized(self) -> float:
        """``prime_count * log T / T^delta``."""
        return self.prime_count * math.log(self.T) / self.T ** self.delta_used

    def as_dict(self) -> dict:
        return {
            "T": self.T,
            "prime_count": self.prime_count,
            "almost_prime_counts": {str(r): c for r, c in sorted(self.almost_prime_counts.items())},
            "delta_used": self.delta_used,
            "normalized_prime_count": self.normalized,
        }


def sieve(census: Mapping[int, int], T: int, r_max: int, delta: float = 1.3057) -> SieveReport:
    """Prime and almost-prime curvature counts (with multiplicity) up to ``T``.

    Only positive curvatures take part.  ``almost_prime_counts[r]`` counts
    curvatures with at most ``r`` prime factors, so it includes primes and 1.
    """
    prime_count = 0
    almost = {r: 0 for r in range(1, r_max + 1)}
    for k, mult in census.items():
        if k <= 0 or k > T:
            continue
        omega = prime_factor_count(k)
        if omega == 1:
            prime_count += mult
        for r in almost:
            if omega <= r:
                almost[r] += mult
    return SieveReport(int(T), prime_count, almost, delta)
