import random
from fractions import Fraction

import numpy as np
import pytest

from packlab.descartes import (
    DescartesQuadruple,
    curvature_census,
    generate,
    place_root,
    realize,
    reflect,
    root_quadruple_bounded,
    tangency_defect,
)
from packlab.errors import InvalidRoot, PackingOverflow, UnboundedRoot, ZeroCurvature

from oracles import brute_force_packing, descartes_second_root


def test_root_relations():
    q = root_quadruple_bounded()
    assert q.k == (-1, 2, 2, 3)
    assert 2 * sum(k * k for k in q.k) - sum(q.k) ** 2 == 0
    assert q.descartes_defect() == 0
    assert q.extended_defect() == (0, 0)


def test_fourth_curvature_is_forced():
    lo, hi = descartes_second_root((-1, 2, 2))
    assert lo == hi == 3


def test_root_realization():
    circles = realize(root_quadruple_bounded())
    assert abs(circles[0].center) < 1e-15 and abs(circles[0].radius - 1) < 1e-15
    assert {round(c.center.imag, 12) for c in circles[1:3]} == {0.5, -0.5}
    assert tangency_defect(root_quadruple_bounded()) < 1e-12


def test_realize_single_circle_definition():
    q = DescartesQuadruple((-1, 2, 2, 3), (0, 0, 0, 2), (0, 1, -1, 0))
    c = realize(q)[2]
    assert abs(c.center - (-0.5j)) < 1e-15 and abs(c.radius - 0.5) < 1e-15
    # k = 2, w = 2i: center i, radius 1/2
    c = realize(DescartesQuadruple((-1, 2, 2, 3), (0, 0, 0, 2), (0, 2, -1, 0)))[1]
    assert abs(c.center - 1j) < 1e-15 and abs(c.radius - 0.5) < 1e-15


def test_zero_curvature_rejected():
    q = DescartesQuadruple((0, 0, 1, 1), (0, 0, 0, 0), (1, -1, 0, 0))
    with pytest.raises(ZeroCurvature):
        realize(q)


@pytest.mark.parametrize("i, expected", [(0, 15), (2, 6)])
def test_reflect_matches_quadratic_root(i, expected):
    q = root_quadruple_bounded()
    others = [k for j, k in enumerate(q.k) if j != i]
    roots = descartes_second_root(others)
    new = reflect(q, i)
    assert new.k[i] == expected
    assert sorted(roots) == sorted((q.k[i], expected))
    assert new.is_valid()


def test_reflect_is_involution():
    q = root_quadruple_bounded()
    for i in range(4):
        assert reflect(reflect(q, i), i) == q


def _reference_tangency(q):
    # independent: rational centers and radii, tangency checked in floats
    worst = 0.0
    cs = [complex(Fraction(a, k * q.scale), Fraction(b, k * q.scale)) for k, a, b in zip(q.k, q.wr, q.wi)]
    rs = [1 / abs(k) for k in q.k]
    for i in range(4):
        for j in range(i + 1, 4):
            want = rs[i] + rs[j] if q.k[i] > 0 and q.k[j] > 0 else abs(rs[i] - rs[j])
            worst = max(worst, abs(abs(cs[i] - cs[j]) - want))
    return worst


def test_random_words_keep_invariants():
    rng = random.Random(7)
    root = root_quadruple_bounded()
    for _ in range(300):
        q = root
        for _ in range(rng.randint(1, 20)):
            q = reflect(q, rng.randrange(4))
            assert q.descartes_defect() == 0 and q.extended_defect() == (0, 0)
        assert _reference_tangency(q) < 1e-9


def test_place_root_other_roots():
    for k in [(-2, 3, 6, 7), (-3, 5, 8, 8), (-4, 8, 9, 9)]:
        q = place_root(k)
        assert q.is_valid() and sorted(q.k) == sorted(k)
        assert _reference_tangency(q) < 1e-12


def test_place_root_rejects():
    with pytest.raises(InvalidRoot):
        place_root((1, 1, 1, 1))
    with pytest.raises(UnboundedRoot):
        place_root((0, 0, 1, 1))


def test_generate_t3():
    run = generate(root_quadruple_bounded(), 3)
    assert len(run) == 5
    assert sorted(run.k.tolist()) == [-1, 2, 2, 3, 3]
    assert curvature_census(run) == {-1: 1, 2: 2, 3: 2}


def test_generate_t2_root_only():
    run = generate(root_quadruple_bounded(), 2)
    assert run.k.tolist() == [-1, 2, 2]


def test_generate_rejects_unbounded_root():
    q = DescartesQuadruple((0, 0, 1, 1), (0, 0, 0, 0), (1, -1, 0, 0))
    with pytest.raises(UnboundedRoot):
        generate(q, 10)


def test_overflow_is_detected():
    with pytest.raises(PackingOverflow):
        generate(root_quadruple_bounded(), 2 ** 62)


@pytest.mark.parametrize("t", [3, 6, 15, 40])
def test_generate_matches_brute_force(t):
    q = root_quadruple_bounded()
    hist = brute_force_packing(q.k, list(zip(q.wr, q.wi)), t, depth=9)
    assert hist[9] == hist[7], "oracle depth too small"
    run = generate(q, t)
    got = list(zip(run.k.tolist(), run.wr.tolist(), run.wi.tolist()))
    assert len(got) == len(set(got))
    assert set(got) == hist[9]


def test_canonical_order_and_uniqueness():
    run = generate(root_quadruple_bounded(), 500)
    keys = list(zip(run.k.tolist(), run.wr.tolist(), run.wi.tolist()))
    assert keys == sorted(keys)
    assert len(set(keys)) == len(keys)
    assert np.all(np.abs(run.k) <= 500)


def test_thread_count_does_not_change_output():
    a = generate(root_quadruple_bounded(), 3000, workers=1)
    b = generate(root_quadruple_bounded(), 3000, workers=4)
    for name in ("k", "wr", "wi", "word_len"):
        assert np.array_equal(getattr(a, name), getattr(b, name))


def test_prefix_census_is_stable():
    small = generate(root_quadruple_bounded(), 200)
    big = generate(root_quadruple_bounded(), 800)
    assert curvature_census(big.truncate(200)) == curvature_census(small)
    assert sum(curvature_census(big).values()) == len(big)


def test_counts_monotone_and_growing():
    run = generate(root_quadruple_bounded(), 4096)
    ts = [16, 32, 64, 128, 256, 512, 1024, 2048, 4096]
    counts = [int(np.count_nonzero(np.abs(run.k) <= t)) for t in ts]
    assert all(b > a for a, b in zip(counts, counts[1:]))


def test_circles_lie_in_closed_unit_disk():
    run = generate(root_quadruple_bounded(), 200)
    # every circle lies inside the closed unit disk
    assert np.all(np.abs(run.centers[1:]) + run.radii[1:] <= 1 + 1e-12)
