"""Pairs of representations of one free group.

Matched-word boundary pairs, cross-ratio conformality statistics, the joint
exponent of summed displacements, and torus (circle pair) counting.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    InsufficientConcyclic,
    InsufficientData,
    InvalidInput,
    MismatchedPairing,
    NotLoxodromic,
)
from .moebius import BASEPOINT, GeneralizedCircle, H3Point, MoebiusMap, apply_circle
from .orbits import (
    ExponentEstimate,
    GroupPresentation,
    _walk,
    attracting_fixed_points,
    presentation_from_dict,
    reduced_words,
    shell_slope,
)
from .stats import CountSeries

JOINT_BOUND = 2 / math.sqrt(2)


# --------------------------------------------------------------------------
# Ping-pong certification

@dataclass(frozen=True)
class PingPongDisks:
    """Generator ``name`` maps the outside of ``disk_inv`` onto the inside of ``disk``."""

    name: str
    disk: tuple[complex, float]
    disk_inv: tuple[complex, float]


def _disk_from_list(v) -> tuple[complex, float]:
    cx, cy, r = (float(x) for x in v)
    if not r > 0:
        raise InvalidInput("disk radius must be positive")
    return complex(cx, cy), r


def verify_pingpong(pres: GroupPresentation, disks: list[PingPongDisks], tol: float = 1e-9) -> None:
    """Raise ``InvalidInput`` unless the disks certify ``pres`` as Schottky."""
    by_name = {d.name: d for d in disks}
    if sorted(by_name) != sorted(pres.names):
        raise InvalidInput("ping-pong disks must name every generator exactly once")
    all_disks = [x for d in disks for x in (d.disk, d.disk_inv)]
    for i in range(len(all_disks)):
        for j in range(i + 1, len(all_disks)):
            (c1, r1), (c2, r2) = all_disks[i], all_disks[j]
            if abs(c1 - c2) <= r1 + r2:
                raise InvalidInput("ping-pong disks are not pairwise disjoint")
    for name, g in zip(pres.names, pres.generators):
        d = by_name[name]
        src = GeneralizedCircle.from_center_radius(*d.disk_inv)
        img = apply_circle(g, src)
        if img.is_line or abs(img.center - d.disk[0]) > tol * (1 + abs(d.disk[0])) \
                or abs(img.radius - d.disk[1]) > tol * (1 + d.disk[1]):
            raise InvalidInput(f"generator {name} does not pair its ping-pong circles")
        # infinity lies outside disk_inv, so it must land inside disk
        if g.c == 0 or abs(g.a / g.c - d.disk[0]) >= d.disk[1]:
            raise InvalidInput(f"generator {name} maps the outside of disk_inv the wrong way")


def pingpong_for(pres: GroupPresentation, disks: list[PingPongDisks], m: MoebiusMap) -> list[PingPongDisks]:
    """Transport ping-pong disks along with ``pres.conjugate(m)``.

    ``m`` must not have its pole inside any disk.
    """
    out = []
    for d in disks:
        pair = []
        for c, r in (d.disk, d.disk_inv):
            img = apply_circle(m, GeneralizedCircle.from_center_radius(c, r))
            pair.append((img.center, img.radius))
        out.append(PingPongDisks(d.name, pair[0], pair[1]))
    return out


# --------------------------------------------------------------------------
# Pairs

@dataclass
class RepresentationPair:
    pres1: GroupPresentation
    pres2: GroupPresentation
    pingpong1: list[PingPongDisks] | None = None
    pingpong2: list[PingPongDisks] | None = None

    def __post_init__(self):
        if self.pres1.names != self.pres2.names:
            raise InvalidInput("both presentations need identical generator name lists")

    def verify(self) -> None:
        if self.pingpong1 is None or self.pingpong2 is None:
            raise InvalidInput("ping-pong disks are required for boundary maps")
        verify_pingpong(self.pres1, self.pingpong1)
        verify_pingpong(self.pres2, self.pingpong2)

    def to_dict(self) -> dict:
        def disks(dd):
            return [
                {
                    "name": d.name,
                    "disk": [d.disk[0].real, d.disk[0].imag, d.disk[1]],
                    "disk_inv": [d.disk_inv[0].real, d.disk_inv[0].imag, d.disk_inv[1]],
                }
                for d in dd
            ]

        out = {"rho1": self.pres1.to_dict(), "rho2": self.pres2.to_dict()}
        if self.pingpong1 is not None:
            if self.pingpong2 == self.pingpong1:
                out["pingpong"] = disks(self.pingpong1)
            else:
                out["pingpong"] = {"rho1": disks(self.pingpong1), "rho2": disks(self.pingpong2 or [])}
        return out


def pair_from_dict(data: dict, normalize: bool = False) -> RepresentationPair:
    """Pair config: ``{"rho1": ..., "rho2": ..., "pingpong": [...]}``.

    ``pingpong`` is a list shared by both presentations or a dict with
    separate ``rho1`` / ``rho2`` lists.
    """
    try:
        p1 = presentation_from_dict(data["rho1"], normalize)
        p2 = presentation_from_dict(data["rho2"], normalize)

        def parse(items):
            return [
                PingPongDisks(str(d["name"]), _disk_from_list(d["disk"]), _disk_from_list(d["disk_inv"]))
                for d in items
            ]

        pp = data.get("pingpong")
        if pp is None:
            d1 = d2 = None
        elif isinstance(pp, dict):
            d1, d2 = parse(pp["rho1"]), parse(pp["rho2"])
        else:
            d1 = d2 = parse(pp)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InvalidInput):
            raise
        raise InvalidInput(f"malformed pair config: {exc}") from exc
    return RepresentationPair(p1, p2, d1, d2)


def load_pair(path, normalize: bool = False) -> RepresentationPair:
    with open(path, encoding="utf-8") as fh:
        return pair_from_dict(json.load(fh), normalize)


# --------------------------------------------------------------------------
# Boundary pairs and the cross-ratio statistic

@dataclass
class BoundaryPairSample:
    xi: np.ndarray
    eta: np.ndarray
    words: np.ndarray
    depth: int
    rejected: int = 0

    def __len__(self):
        return len(self.xi)


def boundary_pairs(pair: RepresentationPair, depth: int, verify: bool = True) -> BoundaryPairSample:
    """Attracting fixed points of every reduced word of length ``depth`` in
    both presentations; the map ``xi -> eta`` samples the boundary map."""
    if depth < 4:
        raise InvalidInput("depth must be at least 4")
    if verify:
        pair.verify()
    letters, (M1, M2) = reduced_words([pair.pres1.letter_matrices(), pair.pres2.letter_matrices()], depth)
    xi, lox1 = attracting_fixed_points(M1)
    eta, lox2 = attracting_fixed_points(M2)
    both = lox1 & lox2
    mismatched = int(np.count_nonzero(lox1 != lox2))
    if not both.any():
        raise NotLoxodromic("no matched word is loxodromic in both presentations")
    return BoundaryPairSample(xi[both], eta[both], letters[both], depth, rejected=mismatched)


def cross_ratio_arrays(z1, z2, z3, z4):
    return ((z1 - z3) * (z2 - z4)) / ((z1 - z4) * (z2 - z3))


def concyclicity_defect(cr) -> np.ndarray:
    """``|Im cr| / |cr|``: zero exactly for concyclic quadruples, scale free."""
    return np.abs(cr.imag) / np.abs(cr)


@dataclass
class ConformalityReport:
    quadruples_tested: int
    max_imag_in: float
    max_imag_out: float
    violating_fraction: float
    draws: int
    seed: int
    tol_in: float

    @property
    def verdict(self) -> str:
        if self.violating_fraction > 0:
            return "boundary map is not Moebius on the tested set (certified by violating quadruples)"
        return "no violation found; consistent with a Moebius extension (evidence, not proof)"

    def as_dict(self) -> dict:
        return {
            "quadruples_tested": self.quadruples_tested,
            "max_imag_in": self.max_imag_in,
            "max_imag_out": self.max_imag_out,
            "violating_fraction": self.violating_fraction,
            "draws": self.draws,
            "seed": self.seed,
            "tol_in": self.tol_in,
            "verdict": self.verdict,
        }


def conformality_stat(sample, n_quadruples: int = 1000, tol_in: float = 1e-6,
                      seed: int = 1, max_draws: int | None = None) -> ConformalityReport:
    """Test whether near-concyclic source quadruples stay concyclic.

    Random 4-subsets of the sample whose source concyclicity defect is below
    ``tol_in`` are kept (up to ``n_quadruples``); a kept quadruple violates
    when its image defect exceeds ``10 * tol_in``.
    """
    if tol_in <= 0:
        raise InvalidInput("tol_in must be positive")
    xi = np.asarray(sample.xi if hasattr(sample, "xi") else sample[0], dtype=complex)
    eta = np.asarray(sample.eta if hasattr(sample, "eta") else sample[1], dtype=complex)
    n = len(xi)
    if n < 4:
        raise InsufficientData("need at least four boundary pairs")
    finite = np.isfinite(xi) & np.isfinite(eta)
    rng = np.random.default_rng(seed)
    max_draws = max_draws or 50 * n_quadruples
    kept_in, kept_out = [], []
    draws = 0
    batch = max(1024, n_quadruples)
    while draws < max_draws and sum(len(k) for k in kept_in) < n_quadruples:
        m = min(batch, max_draws - draws)
        idx = rng.integers(0, n, size=(m, 4))
        draws += m
        s = np.sort(idx, axis=1)
        ok = np.all(s[:, 1:] != s[:, :-1], axis=1) & np.all(finite[idx], axis=1)
        idx = idx[ok]
        if not len(idx):
            continue
        zs = xi[idx]
        ws = eta[idx]
        d_in = concyclicity_defect(cross_ratio_arrays(*zs.T))
        sel = d_in < tol_in
        kept_in.append(d_in[sel])
        kept_out.append(concyclicity_defect(cross_ratio_arrays(*ws[sel].T)))
    d_in = np.concatenate(kept_in)[:n_quadruples] if kept_in else np.empty(0)
    d_out = np.concatenate(kept_out)[:n_quadruples] if kept_out else np.empty(0)
    if len(d_in) < max(1, n_quadruples // 10):
        raise InsufficientConcyclic(
            f"only {len(d_in)} of {draws} drawn quadruples are concyclic within {tol_in}"
        )
    return ConformalityReport(
        quadruples_tested=len(d_in),
        max_imag_in=float(d_in.max()),
        max_imag_out=float(d_out.max()),
        violating_fraction=float(np.mean(d_out > 10 * tol_in)),
        draws=draws,
        seed=seed,
        tol_in=tol_in,
    )


# --------------------------------------------------------------------------
# Joint exponent

@dataclass
class JointEnumeration:
    summed: np.ndarray
    dists: np.ndarray
    T: float
    complete: bool


def joint_enumerate(pair: RepresentationPair, o: H3Point = BASEPOINT, T: float = 20.0,
                    L_max: int = 1000, margin: float | None = None, weights=(1.0, 1.0),
                    frontier_cap: int = 5_000_000, workers: int = 1) -> JointEnumeration:
    """Matched words with ``sum_i w_i d(rho_i(gamma) o, o) <= T``."""
    weights = np.asarray(weights, dtype=float)
    if margin is None:
        margin = 2 * (weights[0] * pair.pres1.max_displacement(o) + weights[1] * pair.pres2.max_displacement(o))
    w = _walk(
        [pair.pres1.letter_matrices(), pair.pres2.letter_matrices()],
        o, T + margin, L_max, weights, frontier_cap, workers,
    )
    summed = w.dists @ weights
    keep = summed <= T
    return JointEnumeration(summed[keep], w.dists[keep], T, w.frontier_at_cap == 0)


def joint_exponent(pair: RepresentationPair, o: H3Point = BASEPOINT, T: float = 40.0,
                   window=None, L_max: int = 1000, n_grid: int = 64, workers: int = 1) -> ExponentEstimate:
    """Shell-slope estimate of the growth rate of
    ``#{gamma : d(rho1(gamma) o, o) + d(rho2(gamma) o, o) <= t}``."""
    en = joint_enumerate(pair, o, T, L_max, workers=workers)
    if not en.complete:
        raise InsufficientData("matched enumeration is incomplete; raise L_max or lower T")
    if window is None:
        window = (T / 2, T)
    return shell_slope(en.summed, window, n_grid)


# --------------------------------------------------------------------------
# Torus counting

@dataclass
class CircleList:
    """Plain circles: centers, radii and optional exact curvatures."""

    centers: np.ndarray
    radii: np.ndarray
    curvature: np.ndarray | None = None

    def __len__(self):
        return len(self.radii)

    @classmethod
    def from_run(cls, run) -> "CircleList":
        return cls(run.centers, run.radii, run.k.copy())


@dataclass(frozen=True)
class TorusRecord:
    c1: GeneralizedCircle
    c2: GeneralizedCircle
    vol: float


def map_circles(m: MoebiusMap, circles: CircleList) -> CircleList:
    """Images of many circles under ``m`` (vectorized Hermitian transport)."""
    c0 = np.asarray(circles.centers, dtype=complex)
    r = np.asarray(circles.radii, dtype=float)
    if m.c == 0:
        # affine z -> lam z + mu: no transport needed, and power-of-two
        # scalings stay exact in floating point
        lam, mu = m.a / m.d, m.b / m.d
        return CircleList(lam * c0 + mu, abs(lam) * r)
    inv = m.inverse()
    # circle as H = [[1, -c0], [-conj(c0), |c0|^2 - r^2]]; H' = N^* H N with N = m^-1
    p, q, s, u = inv.a, inv.b, inv.c, inv.d
    A = 1.0
    B = -c0
    C = np.abs(c0) ** 2 - r * r
    # entries of N^* H N for N = [[p, q], [s, u]]
    A2 = A * abs(p) ** 2 + 2 * (np.conj(p) * B * s).real + C * abs(s) ** 2
    B2 = A * np.conj(p) * q + np.conj(p) * B * u + np.conj(s) * np.conj(B) * q + C * np.conj(s) * u
    disc = np.abs(B2) ** 2 - A2 * (abs(q) ** 2 + 2 * (np.conj(q) * B * u).real + C * abs(u) ** 2)
    with np.errstate(divide="ignore"):
        radius = np.sqrt(disc) / np.abs(A2)
        centers = -B2 / A2
    return CircleList(centers, radius)


def torus_volumes(circles, map_rule="identity") -> np.ndarray:
    """``rad(C1) * rad(C2)`` for each pair given by ``map_rule``.

    ``map_rule`` is ``"identity"`` (pair each circle with itself), a
    :class:`MoebiusMap` (pair ``C`` with its image) or a second circle list
    or run matched by index.
    """
    if not isinstance(circles, CircleList):
        circles = CircleList.from_run(circles)
    if isinstance(map_rule, str):
        if map_rule != "identity":
            raise InvalidInput(f"unknown map rule {map_rule!r}")
        return circles.radii * circles.radii
    if isinstance(map_rule, MoebiusMap):
        return circles.radii * map_circles(map_rule, circles).radii
    other = map_rule if isinstance(map_rule, CircleList) else CircleList.from_run(map_rule)
    if len(other) != len(circles):
        raise MismatchedPairing(f"paired runs differ in length ({len(circles)} vs {len(other)})")
    return circles.radii * other.radii


def torus_records(circles, map_rule="identity") -> list[TorusRecord]:
    if not isinstance(circles, CircleList):
        circles = CircleList.from_run(circles)
    if isinstance(map_rule, MoebiusMap):
        second = map_circles(map_rule, circles)
    elif isinstance(map_rule, str):
        second = circles
    else:
        second = map_rule if isinstance(map_rule, CircleList) else CircleList.from_run(map_rule)
        if len(second) != len(circles):
            raise MismatchedPairing("paired runs differ in length")
    out = []
    for c1, r1, c2, r2 in zip(circles.centers, circles.radii, second.centers, second.radii):
        out.append(TorusRecord(
            GeneralizedCircle.from_center_radius(c1, r1),
            GeneralizedCircle.from_center_radius(c2, r2),
            float(r1 * r2),
        ))
    return out


# volumes within this relative band of 1/t count as ties and are included
_VOL_REL_TOL = 1e-12


def torus_count(circles, map_rule, thresholds) -> CountSeries:
    """``N(t) = #{T : vol(T) >= 1/t}`` on the given thresholds."""
    vol = np.sort(torus_volumes(circles, map_rule))[::-1]
    thresholds = np.asarray(thresholds, dtype=float)
    # count vol >= (1 - tol)/t on the descending array
    key = -vol
    counts = np.searchsorted(key, -(1 - _VOL_REL_TOL) / thresholds, side="right")
    return CountSeries(thresholds, counts)


def circle_count(circles, thresholds) -> CountSeries:
    """``N(t) = #{C : rad(C) >= 1/t}`` with the same tie convention as tori."""
    if not isinstance(circles, CircleList):
        circles = CircleList.from_run(circles)
    r = np.sort(circles.radii)[::-1]
    thresholds = np.asarray(thresholds, dtype=float)
    return CountSeries(thresholds, np.searchsorted(-r, -(1 - _VOL_REL_TOL) / thresholds, side="right"))
