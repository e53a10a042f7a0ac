"""Orbits of finitely generated Moebius groups in H^3 and on the sphere.

Words are reduced words in the generators and their inverses.  Letter ``2i``
is generator ``i`` and letter ``2i + 1`` its inverse, so ``l ^ 1`` inverts a
letter.  All heavy lifting is vectorized over whole word levels.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    FrontierOverflow,
    InsufficientData,
    InsufficientResolution,
    InvalidInput,
    NoLoxodromics,
)
from .moebius import (
    BASEPOINT,
    INF,
    H3Point,
    MoebiusMap,
    busemann_arrays,
    h3_apply,
    h3_apply_arrays,
    h3_distance,
    h3_distance_arrays,
    projectively_equal,
)
from .stats import _ols

LOXODROMIC_TOL = 1e-9


def _inverse_name(name: str) -> str:
    swapped = name.swapcase()
    return swapped if swapped != name else name + "^-1"


@dataclass
class GroupPresentation:
    generators: list[MoebiusMap]
    names: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.generators:
            raise InvalidInput("a presentation needs at least one generator")
        if not self.names:
            self.names = [chr(ord("a") + i) for i in range(len(self.generators))]
        if len(self.names) != len(self.generators) or len(set(self.names)) != len(self.names):
            raise InvalidInput("generator names must be distinct, one per generator")
        ident = MoebiusMap.identity()
        for i, g in enumerate(self.generators):
            if abs(g.det - 1) > 1e-12:
                raise InvalidInput(f"generator {self.names[i]} is not det-normalized")
            if projectively_equal(g, ident, 1e-12):
                raise InvalidInput(f"generator {self.names[i]} is the identity")
            for j in range(i):
                if projectively_equal(g, self.generators[j], 1e-12):
                    raise InvalidInput(f"generators {self.names[j]} and {self.names[i]} coincide")

    @property
    def rank(self) -> int:
        return len(self.generators)

    @property
    def letters(self) -> list[MoebiusMap]:
        out = []
        for g in self.generators:
            out.extend((g, g.inverse()))
        return out

    @property
    def letter_names(self) -> list[str]:
        out = []
        for n in self.names:
            out.extend((n, _inverse_name(n)))
        return out

    def letter_matrices(self) -> np.ndarray:
        return np.array([g.matrix for g in self.letters])

    def word_map(self, word: str | list[int]) -> MoebiusMap:
        """Evaluate a word given as letter indices or a string of letter names."""
        if isinstance(word, str):
            lookup = {n: i for i, n in enumerate(self.letter_names)}
            if any(len(n) != 1 for n in lookup):
                raise InvalidInput("string words need single-character letter names")
            word = [lookup[ch] for ch in word]
        m = MoebiusMap.identity()
        letters = self.letters
        for l in word:
            m = m @ letters[l]
        return m

    def conjugate(self, m: MoebiusMap) -> "GroupPresentation":
        """The presentation ``m g m^-1``."""
        mi = m.inverse()
        return GroupPresentation([m @ g @ mi for g in self.generators], list(self.names))

    def max_displacement(self, o: H3Point = BASEPOINT) -> float:
        return max(h3_distance(o, h3_apply(g, o)) for g in self.generators)

    def to_dict(self) -> dict:
        return {
            "generators": [
                {
                    "name": n,
                    "matrix": [[v.real, v.imag] for v in (g.a, g.b, g.c, g.d)],
                }
                for n, g in zip(self.names, self.generators)
            ]
        }


def presentation_from_dict(data: dict, normalize: bool = False) -> GroupPresentation:
    """Build a presentation from the JSON schema.

    Matrices are row-major ``[a, b, c, d]`` with ``[re, im]`` entries.  A
    determinant off by more than 1e-9 is rejected unless ``normalize``.
    """
    try:
        gens, names = [], []
        for item in data["generators"]:
            entries = [complex(float(re), float(im)) for re, im in item["matrix"]]
            if len(entries) != 4:
                raise InvalidInput("matrix needs four entries")
            a, b, c, d = entries
            det = a * d - b * c
            if abs(det - 1) > 1e-9 and not normalize:
                raise InvalidInput(
                    f"generator {item.get('name')!r} has det {det:.6g}; pass normalize=True to rescale"
                )
            gens.append(MoebiusMap(a, b, c, d))
            names.append(str(item["name"]))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InvalidInput):
            raise
        raise InvalidInput(f"malformed presentation: {exc}") from exc
    return GroupPresentation(gens, names)


def load_presentation(path, normalize: bool = False) -> GroupPresentation:
    with open(path, encoding="utf-8") as fh:
        return presentation_from_dict(json.load(fh), normalize=normalize)


# --------------------------------------------------------------------------
# Level-by-level word walks

def _matmul(A, B):
    """Batched 2x2 product for arrays of shape (n, 2, 2)."""
    return np.einsum("nij,njk->nik", A, B)


def _orbit_points(M, o: H3Point):
    z0 = np.full(len(M), o.z)
    t0 = np.full(len(M), o.t)
    return h3_apply_arrays(M[:, 0, 0], M[:, 0, 1], M[:, 1, 0], M[:, 1, 1], z0, t0)


@dataclass
class _Walk:
    parent: np.ndarray
    letter: np.ndarray
    depth: np.ndarray
    dists: np.ndarray  # (n_nodes, n_presentations)
    z: np.ndarray      # (n_nodes, n_presentations)
    t: np.ndarray
    frontier_at_cap: int


def _walk_subtree(letter_mats, o, first, limit, L_max, weights, cap):
    """Walk reduced words starting with ``first``; keep nodes whose weighted
    summed distance is ``<= limit``."""
    P = len(letter_mats)
    n_letters = letter_mats[0].shape[0]
    M = [lm[first][None] for lm in letter_mats]
    parent_chunks, letter_chunks, depth_chunks = [], [], []
    dist_chunks, z_chunks, t_chunks = [], [], []
    last = np.array([first], dtype=np.int16)
    local_parent = np.array([-1], dtype=np.int64)
    offset = 0
    depth = 1
    frontier_at_cap = 0
    while True:
        zs, ts, ds = [], [], []
        for p in range(P):
            z, t = _orbit_points(M[p], o)
            zs.append(z)
            ts.append(t)
            ds.append(h3_distance_arrays(z, t, o.z, o.t))
        D = np.stack(ds, axis=1)
        total = D @ weights
        keep = total <= limit
        n_keep = int(keep.sum())
        if n_keep > cap:
            raise FrontierOverflow(f"frontier of {n_keep} words exceeds cap {cap}")
        # parents refer to positions among kept nodes of the previous level
        parent_chunks.append(local_parent[keep])
        letter_chunks.append(last[keep])
        depth_chunks.append(np.full(n_keep, depth, dtype=np.int32))
        dist_chunks.append(D[keep])
        z_chunks.append(np.stack(zs, axis=1)[keep])
        t_chunks.append(np.stack(ts, axis=1)[keep])
        if n_keep == 0:
            break
        if depth >= L_max:
            frontier_at_cap = n_keep
            break
        idx = np.arange(offset, offset + n_keep)
        offset += n_keep
        M = [m[keep] for m in M]
        last_kept = last[keep]
        newM = [[] for _ in range(P)]
        new_last, new_parent = [], []
        for l in range(n_letters):
            ok = last_kept != (l ^ 1)
            if not ok.any():
                continue
            for p in range(P):
                newM[p].append(_matmul(M[p][ok], np.broadcast_to(letter_mats[p][l], (int(ok.sum()), 2, 2))))
            new_last.append(np.full(int(ok.sum()), l, dtype=np.int16))
            new_parent.append(idx[ok])
        M = [np.concatenate(x) for x in newM]
        last = np.concatenate(new_last)
        local_parent = np.concatenate(new_parent)
        depth += 1
    return (
        np.concatenate(parent_chunks), np.concatenate(letter_chunks), np.concatenate(depth_chunks),
        np.concatenate(dist_chunks), np.concatenate(z_chunks), np.concatenate(t_chunks), frontier_at_cap,
    )


def _walk(letter_mats, o, limit, L_max, weights, cap, workers=1) -> _Walk:
    P = len(letter_mats)
    n_letters = letter_mats[0].shape[0]
    weights = np.asarray(weights, dtype=float)

    def job(first):
        return _walk_subtree(letter_mats, o, first, limit, L_max, weights, cap)

    if L_max >= 1:
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                parts = list(pool.map(job, range(n_letters)))
        else:
            parts = [job(l) for l in range(n_letters)]
    else:
        parts = []
    parent = [np.array([-1], dtype=np.int64)]
    letter = [np.array([-1], dtype=np.int16)]
    depth = [np.array([0], dtype=np.int32)]
    dists = [np.zeros((1, P))]
    zs = [np.full((1, P), o.z, dtype=complex)]
    ts = [np.full((1, P), o.t)]
    base = 1
    frontier = 0
    for par, let, dep, D, z, t, fr in parts:
        parent.append(np.where(par < 0, 0, par + base))
        letter.append(let)
        depth.append(dep)
        dists.append(D)
        zs.append(z)
        ts.append(t)
        base += len(par)
        frontier += fr
    return _Walk(
        np.concatenate(parent), np.concatenate(letter), np.concatenate(depth),
        np.concatenate(dists), np.concatenate(zs), np.concatenate(ts), frontier,
    )


# --------------------------------------------------------------------------
# Enumeration

@dataclass(frozen=True)
class OrbitRecord:
    word: str
    point: H3Point
    dist: float


@dataclass
class OrbitEnumeration:
    """Orbit points ``gamma o`` of reduced words with ``d(o, gamma o) <= T``.

    ``complete`` is true when no word of length ``L_max`` survived the
    distance filter ``T + margin``, i.e. the ball of radius ``T`` is
    exhausted under the enumeration's pruning rule.
    """

    pres: GroupPresentation
    o: H3Point
    T: float
    L_max: int
    margin: float
    complete: bool
    parent: np.ndarray
    letter: np.ndarray
    depth: np.ndarray
    dist: np.ndarray
    z: np.ndarray
    t: np.ndarray
    record_mask: np.ndarray

    def __len__(self):
        return int(self.record_mask.sum())

    @property
    def record_dists(self) -> np.ndarray:
        return self.dist[self.record_mask]

    def word_letters(self, i: int) -> list[int]:
        out = []
        while i > 0:
            out.append(int(self.letter[i]))
            i = int(self.parent[i])
        return out[::-1]

    def word(self, i: int) -> str:
        names = self.pres.letter_names
        sep = "" if all(len(n) == 1 for n in names) else " "
        return sep.join(names[l] for l in self.word_letters(i))

    @property
    def records(self) -> list[OrbitRecord]:
        idx = np.flatnonzero(self.record_mask)
        return [
            OrbitRecord(self.word(i), H3Point(self.z[i], self.t[i]), float(self.dist[i]))
            for i in idx
        ]

    def collision_rate(self, tol: float = 1e-9) -> float:
        """Fraction of recorded words whose matrix repeats an earlier word's."""
        idx = np.flatnonzero(self.record_mask)
        keys = np.round(np.stack([self.z[idx].real, self.z[idx].imag, np.log(self.t[idx])], 1) / tol)
        _, first = np.unique(keys, axis=0, return_index=True)
        return 1.0 - len(first) / len(idx)


def enumerate_orbit(
    pres: GroupPresentation,
    o: H3Point = BASEPOINT,
    T: float = 10.0,
    L_max: int = 64,
    margin: float | None = None,
    frontier_cap: int = 5_000_000,
    workers: int = 1,
) -> OrbitEnumeration:
    """All orbit points of reduced words up to length ``L_max`` within distance ``T``.

    Words whose distance exceeds ``T + margin`` are not extended further;
    the default margin is twice the largest generator displacement.
    """
    if not T > 0 or L_max < 1:
        raise InvalidInput("need T > 0 and L_max >= 1")
    if margin is None:
        margin = 2 * pres.max_displacement(o)
    w = _walk([pres.letter_matrices()], o, T + margin, L_max, [1.0], frontier_cap, workers)
    dist = w.dists[:, 0]
    return OrbitEnumeration(
        pres, o, T, L_max, margin, w.frontier_at_cap == 0,
        w.parent, w.letter, w.depth, dist, w.z[:, 0], w.t[:, 0], dist <= T,
    )


# --------------------------------------------------------------------------
# Exponents

@dataclass(frozen=True)
class ExponentEstimate:
    value: float
    window: tuple[float, float]
    stderr: float
    sample_count: int

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "window": list(self.window),
            "stderr": self.stderr,
            "sample_count": self.sample_count,
        }


def shell_slope(dists, window, n_grid: int = 64, min_shells: int = 10) -> ExponentEstimate:
    """Slope of ``log #{d <= T}`` against ``T`` on a uniform grid in ``window``."""
    d = np.sort(np.asarray(dists, dtype=float))
    lo, hi = window
    if not lo < hi:
        raise InvalidInput("window must satisfy T1 < T2")
    in_window = d[(d >= lo) & (d <= hi)]
    shells = len(np.unique(np.round(in_window, 9)))
    if shells < min_shells:
        raise InsufficientData(f"{shells} distinct shells in window, need {min_shells}")
    grid = np.linspace(lo, hi, n_grid)
    n = np.searchsorted(d, grid, side="right")
    slope, _, stderr = _ols(grid, np.log(n))
    return ExponentEstimate(slope, (float(lo), float(hi)), stderr, int(np.searchsorted(d, hi, side="right")))


def critical_exponent(orbit, window=None, n_grid: int = 64, min_shells: int = 10) -> ExponentEstimate:
    """Growth rate of ``#{gamma : d(o, gamma o) <= T}``.

    ``orbit`` is an :class:`OrbitEnumeration` (must be complete) or an array
    of orbit distances.  The default window is the upper half ``[T/2, T]``.
    """
    if isinstance(orbit, OrbitEnumeration):
        if not orbit.complete:
            raise InsufficientData("orbit enumeration is incomplete; raise L_max or lower T")
        dists, T = orbit.record_dists, orbit.T
    else:
        dists = np.asarray(orbit, dtype=float)
        T = float(dists.max())
    if window is None:
        window = (T / 2, T)
    if window[1] > T + 1e-12:
        raise InsufficientData(f"window end {window[1]} lies beyond the enumerated radius {T}")
    return shell_slope(dists, window, n_grid, min_shells)


# --------------------------------------------------------------------------
# Limit sets

def reduced_words(letter_mats: list[np.ndarray], n: int):
    """All reduced words of length exactly ``n``.

    Returns ``(letters, mats)`` with ``letters`` of shape ``(W, n)`` and one
    ``(W, 2, 2)`` matrix array per presentation.
    """
    n_letters = letter_mats[0].shape[0]
    letters = np.arange(n_letters, dtype=np.int16)[:, None]
    mats = [lm.copy() for lm in letter_mats]
    for _ in range(n - 1):
        last = letters[:, -1]
        new_letters, new_mats = [], [[] for _ in mats]
        for l in range(n_letters):
            ok = last != (l ^ 1)
            new_letters.append(np.hstack([letters[ok], np.full((int(ok.sum()), 1), l, dtype=np.int16)]))
            for p, m in enumerate(mats):
                new_mats[p].append(_matmul(m[ok], np.broadcast_to(letter_mats[p][l], (int(ok.sum()), 2, 2))))
        letters = np.concatenate(new_letters)
        mats = [np.concatenate(x) for x in new_mats]
    return letters, mats


def attracting_fixed_points(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Attracting fixed points of a batch of SL(2, C) matrices.

    Returns ``(points, loxodromic_mask)``.  The attracting point is the
    eigenline of the eigenvalue of larger modulus; infinity is ``INF``.
    """
    a, b, c, d = M[:, 0, 0], M[:, 0, 1], M[:, 1, 0], M[:, 1, 1]
    tr = a + d
    s = np.sqrt(tr * tr - 4 + 0j)
    lam = np.where(np.abs(tr + s) >= np.abs(tr - s), (tr + s) / 2, (tr - s) / 2)
    lox = (np.abs(tr.imag) > LOXODROMIC_TOL) | (np.abs(tr.real) > 2 + LOXODROMIC_TOL)
    # eigenvector from whichever row of (M - lam I) is better conditioned
    r1 = np.abs(a - lam) + np.abs(b)
    r2 = np.abs(c) + np.abs(d - lam)
    with np.errstate(divide="ignore", invalid="ignore"):
        z1 = b / (lam - a)
        z2 = (lam - d) / c
    z = np.where(r1 >= r2, z1, z2)
    z = np.where(np.isfinite(z), z, INF)
    return z, lox


@dataclass
class LimitSample:
    points: np.ndarray
    method: str
    depth: int
    words: np.ndarray | None = None

    def __len__(self):
        return len(self.points)


def shadow_arrays(z, t, o: H3Point = BASEPOINT):
    """Endpoint of the geodesic ray from ``o`` through each point ``(z, t)``."""
    z = (np.asarray(z, dtype=complex) - o.z) / o.t
    t = np.asarray(t, dtype=float) / o.t
    u = np.abs(z)
    with np.errstate(divide="ignore", invalid="ignore"):
        c = (u * u + t * t - 1) / (2 * u)
        end = (c + np.sqrt(c * c + 1)) * z / u
    vertical = u == 0
    end = np.where(vertical, np.where(t < 1, 0j, INF), end)
    return np.where(np.isfinite(end), o.z + o.t * end, INF)


def limit_sample(pres: GroupPresentation, depth: float, method: str = "loxodromic",
                 o: H3Point = BASEPOINT, L_max: int = 100_000) -> LimitSample:
    """Sample the limit set.

    ``loxodromic``: attracting fixed points of all reduced words of length
    ``depth`` passing the trace test.  ``orbit``: radial shadows, seen from
    ``o``, of the orbit points in the ball of hyperbolic radius ``depth``
    whose distance lies in the top decile.  The orbit method copes with
    cusps, where fixed points of fixed-length words bunch up.
    """
    if depth < 2:
        raise InvalidInput("depth must be at least 2")
    if method == "loxodromic":
        letters, (M,) = reduced_words([pres.letter_matrices()], int(depth))
        z, lox = attracting_fixed_points(M)
        if not lox.any():
            raise NoLoxodromics("no word passes the loxodromic trace test")
        return LimitSample(z[lox], method, depth, letters[lox])
    if method == "orbit":
        orb = enumerate_orbit(pres, o, T=float(depth), L_max=L_max)
        d = orb.record_dists
        cut = np.quantile(d, 0.9)
        sel = orb.record_mask & (orb.dist >= cut) & (orb.depth > 0)
        return LimitSample(shadow_arrays(orb.z[sel], orb.t[sel], o), method, depth)
    raise InvalidInput(f"unknown limit sampling method {method!r}")


_CHART_CANDIDATES = (INF, 1j, -1j, 1.0, -1.0, 1 + 1j, -1 - 1j, 2j, -2j, 0j)


def _chordal(z, w):
    z = np.asarray(z, dtype=complex)
    fin = np.isfinite(z)
    out = np.empty(z.shape)
    zf = z[fin]
    if np.isinf(w):
        out[fin] = 2 / np.sqrt(1 + np.abs(zf) ** 2)
        out[~fin] = 0.0
    else:
        out[fin] = 2 * np.abs(zf - w) / np.sqrt((1 + np.abs(zf) ** 2) * (1 + abs(w) ** 2))
        out[~fin] = 2 / math.sqrt(1 + abs(w) ** 2)
    return out


def auto_chart(points) -> MoebiusMap:
    """Identity when infinity is far from the points, else a fixed map that
    sends the best of a few candidate points to infinity."""
    pts = np.asarray(points, dtype=complex)
    if len(pts) > 20000:
        pts = pts[:: len(pts) // 20000]
    best, best_gap = None, -1.0
    for cand in _CHART_CANDIDATES:
        gap = float(np.min(_chordal(pts, cand))) if len(pts) else 2.0
        if gap > best_gap + 1e-9:
            best, best_gap = cand, gap
        if cand is INF and gap >= 0.25:
            break
    if np.isinf(best):
        return MoebiusMap.identity()
    return MoebiusMap(0, 1, 1, -best)


def apply_chart(chart: MoebiusMap, points) -> np.ndarray:
    z = np.asarray(points, dtype=complex)
    out = np.empty_like(z)
    fin = np.isfinite(z)
    zf = z[fin]
    with np.errstate(divide="ignore", invalid="ignore"):
        out[fin] = (chart.a * zf + chart.b) / (chart.c * zf + chart.d)
    out[~fin] = chart.a / chart.c if chart.c != 0 else INF
    return out


def box_counts(points: np.ndarray, eps) -> np.ndarray:
    """Occupied boxes of square grids anchored at the origin."""
    out = []
    for e in np.atleast_1d(eps):
        ix = np.floor(points.real / e).astype(np.int64)
        iy = np.floor(points.imag / e).astype(np.int64)
        # pack both indices into one key; the spread is far below 2^31 per axis
        key = (ix - ix.min()) * (int(iy.max() - iy.min()) + 1) + (iy - iy.min())
        out.append(len(np.unique(key)))
    return np.array(out)


def min_separation(points) -> float:
    from scipy.spatial import cKDTree

    pts = np.unique(np.asarray(points, dtype=complex))
    if len(pts) < 2:
        return math.inf
    xy = np.stack([pts.real, pts.imag], 1)
    dd, _ = cKDTree(xy).query(xy, k=2)
    return float(dd[:, 1].min())


def below_separation_grid(points, octaves: int = 3) -> np.ndarray:
    """Dyadic scales finer than the minimum separation of a finite point set."""
    sep = min_separation(points)
    top = 1.0 if math.isinf(sep) else 2.0 ** math.floor(math.log2(sep / 4))
    return top * 2.0 ** -np.arange(octaves + 1)


def box_dimension(sample, eps_grid=None, chart="auto", min_points: int = 10_000,
                  saturation: float = 8.0, min_octaves: int = 3) -> ExponentEstimate:
    """Box-counting dimension of a limit sample (slope of log count vs log 1/eps).

    With ``eps_grid=None`` a dyadic grid is chosen: from a quarter of the
    sample diameter down to the finest scale at which occupied boxes still
    hold ``saturation`` points on average.  Points are first moved by
    ``chart`` (``"auto"`` pushes infinity away from the sample).
    """
    pts = sample.points if isinstance(sample, LimitSample) else np.asarray(sample, dtype=complex)
    if chart == "auto":
        chart = auto_chart(pts)
    if chart is not None:
        pts = apply_chart(chart, pts)
    if not np.all(np.isfinite(pts)):
        raise InvalidInput("sample has infinite points in the chosen chart")
    pts = np.unique(pts)
    n = len(pts)
    if eps_grid is None:
        if n < min_points:
            raise InsufficientData(f"{n} distinct sample points, need {min_points}")
        diam = max(np.ptp(pts.real), np.ptp(pts.imag))
        e = 2.0 ** math.floor(math.log2(diam / 4))
        eps = []
        while box_counts(pts, [e])[0] * saturation <= n:
            eps.append(e)
            e /= 2
        if len(eps) < min_octaves + 1:
            raise InsufficientResolution(
                f"sample of {n} points saturates after {len(eps)} dyadic scales"
            )
        eps_grid = np.array(eps)
    eps_grid = np.asarray(eps_grid, dtype=float)
    if n == 0:
        raise InsufficientData("empty sample")
    counts = box_counts(pts, eps_grid)
    slope, _, stderr = _ols(np.log(1 / eps_grid), np.log(counts))
    return ExponentEstimate(slope, (float(eps_grid.min()), float(eps_grid.max())), stderr, n)


def limit_set_dimension(pres: GroupPresentation, depth: int, method: str = "loxodromic",
                        chart="auto", **kwargs) -> ExponentEstimate:
    """Box dimension of the limit set sampled at ``depth``.

    If the sample does not grow from ``depth`` to ``depth + 1`` the limit
    set is finite and is measured below its separation (dimension 0).
    """
    s1 = limit_sample(pres, depth, method)
    key = lambda s: set(np.round(apply_chart(auto_chart(s.points), s.points), 12))  # noqa: E731
    small = len(s1) < kwargs.get("min_points", 10_000)
    if small and key(s1) == key(limit_sample(pres, depth + 1, method)):
        c = auto_chart(s1.points) if chart == "auto" else chart
        pts = apply_chart(c, s1.points) if c is not None else s1.points
        return box_dimension(pts, eps_grid=below_separation_grid(pts), chart=None)
    return box_dimension(s1, chart=chart, **kwargs)


# --------------------------------------------------------------------------
# Empirical Patterson-Sullivan measure

@dataclass
class PSEmpirical:
    atoms: np.ndarray
    weights: np.ndarray
    total_mass: float
    s: float
    discrepancy: float


def _cells(z, lo, hi, shape):
    nx, ny = shape
    fx = (z.real - lo.real) / (hi.real - lo.real)
    fy = (z.imag - lo.imag) / (hi.imag - lo.imag)
    inside = (fx >= 0) & (fx < 1) & (fy >= 0) & (fy < 1)
    ix = np.clip((fx * nx).astype(np.int64), 0, nx - 1)
    iy = np.clip((fy * ny).astype(np.int64), 0, ny - 1)
    return np.where(inside, ix * ny + iy, nx * ny)


def ps_empirical(orbit: OrbitEnumeration, s: float, partition=(4, 4)) -> PSEmpirical:
    """Weighted atoms ``e^{-s d(o, gamma o)}`` at orbit shadows, plus a
    conformality discrepancy.

    For every generator letter ``gamma`` and cell ``E`` of a grid partition
    (over the atoms' bounding box, plus one cell for the rest of the sphere)
    the discrepancy compares ``nu(gamma E)`` with the normalized integral of
    ``exp(s * beta_xi(o, gamma^-1 o))`` over ``E``.  It is a trend diagnostic,
    not a certificate.
    """
    if not 0 < s <= 2:
        raise InvalidInput("s must lie in (0, 2]")
    mask = orbit.record_mask & (orbit.depth > 0)
    atoms = shadow_arrays(orbit.z[mask], orbit.t[mask], orbit.o)
    w = np.exp(-s * orbit.dist[mask])
    total = float(w.sum())
    w = w / total
    o = orbit.o
    one_cell = tuple(partition) == (1, 1)
    if not one_cell:
        pad = 1e-9 + 1e-6 * max(np.ptp(atoms.real), np.ptp(atoms.imag))
        lo = complex(atoms.real.min() - pad, atoms.imag.min() - pad)
        hi = complex(atoms.real.max() + pad, atoms.imag.max() + pad)
        n_cells = partition[0] * partition[1] + 1
        home = _cells(atoms, lo, hi, partition)
    worst = 0.0
    for g in orbit.pres.letters:
        gi = g.inverse()
        with np.errstate(divide="ignore", invalid="ignore"):
            moved = (gi.a * atoms + gi.b) / (gi.c * atoms + gi.d)
        p = h3_apply(gi, o)
        density = np.exp(s * busemann_arrays(atoms, o.z, o.t, p.z, p.t))
        rhs = w * density
        rhs = rhs / rhs.sum()
        if one_cell:
            lhs_cells = np.array([w.sum()])
            rhs_cells = np.array([rhs.sum()])
        else:
            moved = np.where(np.isfinite(moved), moved, complex(1e300, 1e300))
            lhs_cells = np.bincount(_cells(moved, lo, hi, partition), weights=w, minlength=n_cells)
            rhs_cells = np.bincount(home, weights=rhs, minlength=n_cells)
        worst = max(worst, float(np.max(np.abs(lhs_cells - rhs_cells))))
    return PSEmpirical(atoms, w, total, float(s), worst)


# --------------------------------------------------------------------------
# Fixture builders

def pairing_map(c_from: complex, r_from: float, c_to: complex, r_to: float,
                twist: complex = -1.0) -> MoebiusMap:
    """Moebius map sending the outside of circle ``(c_from, r_from)`` onto the
    inside of circle ``(c_to, r_to)``: ``z -> c_to + twist * r_from r_to / (z - c_from)``.

    ``|twist| = 1``.  Real centers with ``twist = -1`` give an SL(2, R) map.
    """
    k = twist * r_from * r_to
    return MoebiusMap(c_to, k - c_to * c_from, 1, -c_from)


def schottky_group(disks, twists=None, names=None) -> GroupPresentation:
    """Schottky group from pairs ``((c, r), (c', r'))``: generator ``i`` maps
    the outside of the first disk onto the inside of the second."""
    twists = twists or [-1.0] * len(disks)
    gens = [pairing_map(c1, r1, c2, r2, tw) for ((c1, r1), (c2, r2)), tw in zip(disks, twists)]
    return GroupPresentation(gens, names or [])
