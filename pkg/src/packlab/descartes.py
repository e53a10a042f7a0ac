"""Exact-integer Apollonian packings.

A Descartes quadruple holds four integer curvatures and four Gaussian-integer
curvature-centers ``W_i = scale * k_i * center_i``.  The four Apollonian
generators act linearly on both,

    k_i -> 2 * sum_{j != i} k_j - k_i,    W_i -> 2 * sum_{j != i} W_j - W_i,

so every circle of an integral packing is reached in exact arithmetic.
Indices are 0-based throughout.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .errors import InvalidRoot, PackingOverflow, UnboundedRoot, ZeroCurvature
from .moebius import GeneralizedCircle

# any |entry| below this keeps 2*sum - 3*entry inside int64
_SAFE_MAGNITUDE = 1 << 58


@dataclass(frozen=True)
class DescartesQuadruple:
    k: tuple[int, int, int, int]
    wr: tuple[int, int, int, int]
    wi: tuple[int, int, int, int]
    scale: int = 1

    def __post_init__(self):
        for name in ("k", "wr", "wi"):
            v = tuple(int(x) for x in getattr(self, name))
            if len(v) != 4:
                raise ValueError(f"{name} needs four entries")
            object.__setattr__(self, name, v)
        if self.scale <= 0:
            raise ValueError("scale must be positive")

    @property
    def w(self) -> tuple[complex, ...]:
        """Curvature-centers as floats (``k_i * center_i``)."""
        return tuple(complex(a, b) / self.scale for a, b in zip(self.wr, self.wi))

    def descartes_defect(self) -> int:
        return 2 * sum(x * x for x in self.k) - sum(self.k) ** 2

    def extended_defect(self) -> tuple[int, int]:
        """Real and imaginary parts of ``2 sum W^2 - (sum W)^2`` (exact)."""
        sq_re = sum(a * a - b * b for a, b in zip(self.wr, self.wi))
        sq_im = sum(2 * a * b for a, b in zip(self.wr, self.wi))
        sr, si = sum(self.wr), sum(self.wi)
        return 2 * sq_re - (sr * sr - si * si), 2 * sq_im - 2 * sr * si

    def is_valid(self) -> bool:
        return self.descartes_defect() == 0 and self.extended_defect() == (0, 0)


def reflect(q: DescartesQuadruple, i: int) -> DescartesQuadruple:
    """Apply the ``i``-th Apollonian generator (replace circle ``i``)."""
    def swap(v):
        v = list(v)
        v[i] = 2 * (sum(v) - v[i]) - v[i]
        return tuple(v)

    return DescartesQuadruple(swap(q.k), swap(q.wr), swap(q.wi), q.scale)


def root_quadruple_bounded() -> DescartesQuadruple:
    """The (-1, 2, 2, 3) root: unit bounding circle at 0, the two curvature-2
    circles at +-i/2 and the curvature-3 circle at 2/3."""
    return DescartesQuadruple(k=(-1, 2, 2, 3), wr=(0, 0, 0, 2), wi=(0, 1, -1, 0))


def _gaussian_reps(n: int) -> Iterator[tuple[int, int]]:
    """All Gaussian integers of modulus exactly ``n`` (``n >= 0``)."""
    nn = n * n
    for a in range(n, -n - 1, -1):
        b = math.isqrt(nn - a * a)
        if b * b == nn - a * a:
            yield a, b
            if b:
                yield a, -b


def place_root(k) -> DescartesQuadruple:
    """Exact placement for a bounded integral Descartes quadruple.

    The bounding circle is centered at the origin and the first inner circle
    sits on the positive imaginary axis; the remaining two are found among
    Gaussian-rational centers with denominator ``|k_bound|``.
    """
    k = [int(x) for x in k]
    if len(k) != 4:
        raise InvalidRoot("a root needs four curvatures")
    if 2 * sum(x * x for x in k) - sum(k) ** 2 != 0:
        raise InvalidRoot(f"curvatures {k} violate the Descartes relation")
    negatives = [i for i, x in enumerate(k) if x < 0]
    if len(negatives) != 1 or 0 in k:
        raise UnboundedRoot("a bounded root needs exactly one negative curvature and no zero")
    order = negatives + sorted((i for i in range(4) if i not in negatives), key=lambda i: k[i])
    ks = [k[i] for i in order]
    D = -ks[0]
    W = [(0, 0), (0, ks[1] - D)]

    def tangent(p, kp, q, kq):
        # |Wp/kp - Wq/kq| = D (1/kp + 1/kq), scaled to integers
        dx = kq * p[0] - kp * q[0]
        dy = kq * p[1] - kp * q[1]
        return dx * dx + dy * dy == D * D * (kp + kq) ** 2

    for w2 in _gaussian_reps(ks[2] - D):
        if not tangent(W[1], ks[1], w2, ks[2]):
            continue
        for w3 in _gaussian_reps(ks[3] - D):
            if tangent(W[1], ks[1], w3, ks[3]) and tangent(w2, ks[2], w3, ks[3]):
                cand = W + [w2, w3]
                placed = [None] * 4
                for slot, i in enumerate(order):
                    placed[i] = cand[slot]
                q = DescartesQuadruple(
                    tuple(k), tuple(p[0] for p in placed), tuple(p[1] for p in placed), scale=D
                )
                if q.is_valid():
                    return q
    raise InvalidRoot(f"no Gaussian-rational placement found for root {k}")


def realize(q: DescartesQuadruple) -> list[GeneralizedCircle]:
    """Circle ``i`` has center ``w_i / k_i`` and radius ``1/|k_i|``."""
    out = []
    for kk, w in zip(q.k, q.w):
        if kk == 0:
            raise ZeroCurvature("zero curvature is a line, not allowed in bounded packings")
        out.append(GeneralizedCircle.from_center_radius(w / kk, 1.0 / abs(kk)))
    return out


def tangency_defect(q: DescartesQuadruple) -> float:
    """Largest violation of pairwise tangency, ``| |c_i - c_j| - |1/k_i + 1/k_j| |``.

    Signed radii make the internal tangency with the bounding circle come out
    as a difference of radii.
    """
    centers = [w / kk for kk, w in zip(q.k, q.w)]
    worst = 0.0
    for i in range(4):
        for j in range(i + 1, 4):
            gap = abs(centers[i] - centers[j]) - abs(1.0 / q.k[i] + 1.0 / q.k[j])
            worst = max(worst, abs(gap))
    return worst


@dataclass
class PackingRun:
    """Circles of a packing with curvature at most ``max_curvature``.

    Arrays are in canonical order: curvature, then real and imaginary part of
    the curvature-center.
    """

    root: DescartesQuadruple
    max_curvature: int
    k: np.ndarray
    wr: np.ndarray
    wi: np.ndarray
    word_len: np.ndarray
    dedup_policy: str = "exact (k, w)"
    duplicates_dropped: int = 0
    extra: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.k)

    @property
    def scale(self) -> int:
        return self.root.scale

    @property
    def centers(self) -> np.ndarray:
        d = self.k * self.scale
        # adding 0.0 turns the bounding circle's -0.0 into 0.0
        return (self.wr / d + 0.0) + 1j * (self.wi / d + 0.0)

    @property
    def radii(self) -> np.ndarray:
        return 1.0 / np.abs(self.k)

    @property
    def circles(self) -> list[tuple[int, complex, int]]:
        """``(curvature, curvature-center, word length)`` per circle."""
        return [
            (int(k), complex(a, b) / self.scale, int(n))
            for k, a, b, n in zip(self.k, self.wr, self.wi, self.word_len)
        ]

    def truncate(self, t: int) -> "PackingRun":
        keep = self.k <= t
        return PackingRun(
            self.root, t, self.k[keep], self.wr[keep], self.wi[keep], self.word_len[keep],
            self.dedup_policy,
        )


def _check_magnitude(*arrays):
    for a in arrays:
        if a.size and int(np.max(np.abs(a))) >= _SAFE_MAGNITUDE:
            raise PackingOverflow("curvature data exceeds the checked integer range")


def _bfs(K, WR, WI, last, depth, t):
    """Breadth-first expansion of a frontier over reduced reflection words.

    Yields ``(k, wr, wi, depth)`` arrays of newly created circles per level.
    """
    while len(K):
        _check_magnitude(K, WR, WI)
        SK, SR, SI = K.sum(1), WR.sum(1), WI.sum(1)
        nk, nr, ni, nl = [], [], [], []
        out_k, out_r, out_i = [], [], []
        for i in range(4):
            newk = 2 * SK - 3 * K[:, i]
            keep = (last != i) & (newk <= t)
            if not keep.any():
                continue
            k2, r2, i2 = K[keep].copy(), WR[keep].copy(), WI[keep].copy()
            k2[:, i] = newk[keep]
            r2[:, i] = 2 * SR[keep] - 3 * WR[keep, i]
            i2[:, i] = 2 * SI[keep] - 3 * WI[keep, i]
            nk.append(k2)
            nr.append(r2)
            ni.append(i2)
            nl.append(np.full(len(k2), i, dtype=np.int8))
            out_k.append(k2[:, i])
            out_r.append(r2[:, i])
            out_i.append(i2[:, i])
        depth += 1
        if not nk:
            return
        yield np.concatenate(out_k), np.concatenate(out_r), np.concatenate(out_i), depth
        K, WR, WI, last = (np.concatenate(x) for x in (nk, nr, ni, nl))


def _run_subtree(q: DescartesQuadruple, first: int | None, t: int):
    K = np.array([q.k], dtype=np.int64)
    WR = np.array([q.wr], dtype=np.int64)
    WI = np.array([q.wi], dtype=np.int64)
    last = np.array([-1], dtype=np.int8)
    depth = 0
    chunks = []
    if first is not None:
        # seed with a single depth-1 child so subtrees are disjoint
        child = reflect(q, first)
        if child.k[first] > t:
            return chunks
        K = np.array([child.k], dtype=np.int64)
        WR = np.array([child.wr], dtype=np.int64)
        WI = np.array([child.wi], dtype=np.int64)
        last = np.array([first], dtype=np.int8)
        depth = 1
        chunks.append((K[:, first].copy(), WR[:, first].copy(), WI[:, first].copy(), 1))
    chunks.extend(_bfs(K, WR, WI, last, depth, t))
    return chunks


def generate(root: DescartesQuadruple, t: int, workers: int = 1) -> PackingRun:
    """Every circle of the packing generated by ``root`` with curvature <= ``t``.

    Breadth-first over reduced words; a branch stops as soon as its new
    circle exceeds ``t``.  The four depth-1 subtrees can be farmed out to
    ``workers`` threads; output order is canonical either way.
    """
    if sum(1 for x in root.k if x < 0) != 1 or 0 in root.k:
        raise UnboundedRoot("root must have exactly one negative curvature")
    if not root.is_valid():
        raise InvalidRoot("root violates the Descartes relations")
    t = int(t)
    if abs(t) >= _SAFE_MAGNITUDE // 16:
        raise PackingOverflow(f"threshold {t} exceeds the checked integer range")
    _check_magnitude(np.array(root.wr), np.array(root.wi), np.array(root.k))

    base = [
        (np.array([kk]), np.array([a]), np.array([b]), 0)
        for kk, a, b in zip(root.k, root.wr, root.wi) if kk <= t
    ]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=min(workers, 4)) as pool:
            parts = list(pool.map(lambda i: _run_subtree(root, i, t), range(4)))
    else:
        parts = [_run_subtree(root, i, t) for i in range(4)]
    chunks = base + [c for part in parts for c in part]
    k = np.concatenate([c[0] for c in chunks]).astype(np.int64)
    wr = np.concatenate([c[1] for c in chunks]).astype(np.int64)
    wi = np.concatenate([c[2] for c in chunks]).astype(np.int64)
    wl = np.concatenate([np.full(len(c[0]), c[3], dtype=np.int32) for c in chunks])

    # canonical order; among exact duplicates keep the shortest word
    order = np.lexsort((wl, wi, wr, k))
    k, wr, wi, wl = k[order], wr[order], wi[order], wl[order]
    if len(k) > 1:
        first = np.ones(len(k), dtype=bool)
        first[1:] = (k[1:] != k[:-1]) | (wr[1:] != wr[:-1]) | (wi[1:] != wi[:-1])
    else:
        first = np.ones(len(k), dtype=bool)
    dropped = int((~first).sum())
    return PackingRun(root, t, k[first], wr[first], wi[first], wl[first], duplicates_dropped=dropped)


def curvature_census(run: PackingRun) -> dict[int, int]:
    values, counts = np.unique(run.k, return_counts=True)
    return {int(v): int(c) for v, c in zip(values, counts)}

