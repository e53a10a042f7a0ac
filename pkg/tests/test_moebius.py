import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from packlab.errors import DegenerateQuadruple
from packlab.moebius import (
    BASEPOINT,
    INF,
    GeneralizedCircle,
    H3Point,
    MoebiusMap,
    apply_circle,
    apply_point,
    busemann,
    busemann_at_infinity,
    cross_ratio,
    fixed_points,
    h3_apply,
    h3_distance,
    invert_point,
    is_loxodromic,
    isinf,
    projectively_equal,
    spherical_derivative,
)

coord = st.floats(-3, 3, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, coord, coord)


@st.composite
def maps(draw):
    a, b, c, d = (draw(cplx) for _ in range(4))
    det = a * d - b * c
    if abs(det) < 0.1:
        d += 1.0
        det = a * d - b * c
    if abs(det) < 0.1:
        a, b, c, d = 1, draw(cplx), 0, 1
    return MoebiusMap(a, b, c, d)


@st.composite
def h3points(draw):
    return H3Point(draw(cplx), draw(st.floats(0.05, 5)))


# ---- maps ----

def test_maps_are_det_normalized():
    m = MoebiusMap(2, 0, 0, 2)
    assert abs(m.det - 1) < 1e-12
    assert m == MoebiusMap.identity()


def test_singular_matrix_rejected():
    with pytest.raises(ValueError):
        MoebiusMap(1, 2, 2, 4)


def test_projective_equality_ignores_sign():
    m = MoebiusMap(1, 2, 3, 7)
    neg = MoebiusMap(-m.a, -m.b, -m.c, -m.d)
    assert m == neg
    assert projectively_equal(m, neg)


def test_apply_point_examples():
    assert MoebiusMap.identity()(5 + 2j) == 5 + 2j
    assert abs(apply_point(MoebiusMap(0, -1, 1, 0), 1j) - 1j) < 1e-15
    assert isinf(apply_point(MoebiusMap(1, 1, 0, 1), INF))


def test_pole_and_infinity_conventions():
    m = MoebiusMap(1, 2, 3, 7)
    assert isinf(m(-m.d / m.c))
    assert abs(m(INF) - m.a / m.c) < 1e-15


@given(maps(), cplx)
def test_apply_point_projective(m, z):
    neg = MoebiusMap(-m.a, -m.b, -m.c, -m.d)
    w1, w2 = m(z), neg(z)
    assert (isinf(w1) and isinf(w2)) or abs(w1 - w2) <= 1e-12 * max(1.0, abs(w1))


@given(maps(), maps(), cplx)
def test_composition_matches_pointwise(m1, m2, z):
    w = m1(m2(z))
    v = (m1 @ m2)(z)
    if isinf(w) or isinf(v) or abs(w) > 1e6:
        return
    assert abs(w - v) <= 1e-7 * max(1.0, abs(w))


def test_from_three_points():
    m = MoebiusMap.from_three_points(1j, 2, -1)
    assert abs(m(1j)) < 1e-12
    assert abs(m(2) - 1) < 1e-12
    assert isinf(m(-1))


def test_fixed_points_attracting_first():
    m = MoebiusMap(2, 0, 0, 0.5)
    att, rep = fixed_points(m)
    assert isinf(att) and rep == 0
    assert is_loxodromic(m)
    assert not is_loxodromic(MoebiusMap(1, 1, 0, 1))


# ---- circles ----

def test_circle_canonical_form():
    c = GeneralizedCircle.from_center_radius(1 + 1j, 0.5)
    assert abs(abs(c.B) ** 2 - c.A * c.C - 1) < 1e-12
    assert c.A > 0
    assert abs(c.center - (1 + 1j)) < 1e-12 and abs(c.radius - 0.5) < 1e-12
    line = GeneralizedCircle.line_through(0, 1)
    assert line.is_line and abs(abs(line.B) - 1) < 1e-15


def test_degenerate_circle_rejected():
    with pytest.raises(ValueError):
        GeneralizedCircle(1.0, 0j, 1.0)


def test_apply_circle_identity():
    c = GeneralizedCircle.from_center_radius(0.3 - 2j, 1.7)
    assert apply_circle(MoebiusMap.identity(), c) == c


def test_apply_circle_doubling():
    # oracle: circle through the images of three points of the unit circle
    m = MoebiusMap(math.sqrt(2), 0, 0, 1 / math.sqrt(2))
    img = apply_circle(m, GeneralizedCircle.from_center_radius(0, 1))
    pts = [m(z) for z in (1, 1j, -1)]
    center, radius = _circumcircle(*pts)
    assert abs(img.center - center) < 1e-12 and abs(img.center) < 1e-12
    assert abs(img.radius - radius) < 1e-12 and abs(img.radius - 2) < 1e-12


def test_apply_circle_cayley_sends_real_line_to_unit_circle():
    m = MoebiusMap(1, -1j, 1, 1j)
    line = GeneralizedCircle.line_through(0, 1)
    img = apply_circle(m, line)
    images = [m(0), m(1), m(INF)]
    assert all(abs(a - b) < 1e-12 for a, b in zip(images, [-1, -1j, 1]))
    center, radius = _circumcircle(*images)
    assert abs(img.center - center) < 1e-12 and abs(img.radius - radius) < 1e-12


def _circumcircle(p, q, r):
    # independent three-point circle fit
    ax, ay, bx, by, cx, cy = p.real, p.imag, q.real, q.imag, r.real, r.imag
    d = 2 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    ux = ((ax ** 2 + ay ** 2) * (by - cy) + (bx ** 2 + by ** 2) * (cy - ay) + (cx ** 2 + cy ** 2) * (ay - by)) / d
    uy = ((ax ** 2 + ay ** 2) * (cx - bx) + (bx ** 2 + by ** 2) * (ax - cx) + (cx ** 2 + cy ** 2) * (bx - ax)) / d
    center = complex(ux, uy)
    return center, abs(p - center)


@settings(max_examples=200)
@given(maps(), cplx, st.floats(0.1, 3))
def test_apply_circle_commutes_with_points(m, center, radius):
    c = GeneralizedCircle.from_center_radius(center, radius)
    img = apply_circle(m, c)
    for z in c.sample(16):
        w = m(z)
        if isinf(w) or abs(w) > 1e4:
            continue
        scale = 1 + abs(w) ** 2 * (img.A if not img.is_line else 0) + abs(w)
        assert abs(img.evaluate(w)) <= 1e-9 * scale * max(1.0, abs(img.C), abs(img.B))


def test_invert_point_examples():
    unit = GeneralizedCircle.from_center_radius(0, 1)
    assert abs(invert_point(unit, 2) - 0.5) < 1e-15
    assert isinf(invert_point(unit, 0))
    c = GeneralizedCircle.from_center_radius(1 - 1j, 2.5)
    for z in c.sample(8):
        assert abs(invert_point(c, z) - z) < 1e-12
    line = GeneralizedCircle.line_through(0, 1)
    assert abs(invert_point(line, 2 + 3j) - (2 - 3j)) < 1e-12


@given(cplx, st.floats(0.1, 3), cplx)
def test_invert_point_involution(center, radius, z):
    c = GeneralizedCircle.from_center_radius(center, radius)
    if abs(z - center) < 0.1 * radius:
        return
    w = invert_point(c, invert_point(c, z))
    assert abs(w - z) <= 1e-12 * max(1.0, abs(z))


def test_cross_ratio_infinity_limit():
    lam = 0.3 + 1.1j
    assert abs(cross_ratio(0, 1, INF, lam) - (lam - 1) / lam) < 1e-15


def test_cross_ratio_real_for_concyclic():
    assert cross_ratio(0.1, 2, -3, 7.5).imag == 0
    c = GeneralizedCircle.from_center_radius(1 + 2j, 3)
    z = c.sample(4, phase=0.3)
    assert abs(cross_ratio(*z).imag) < 1e-12


def test_cross_ratio_degenerate():
    with pytest.raises(DegenerateQuadruple):
        cross_ratio(1, 2, 1, 3)


@settings(max_examples=200)
@given(maps(), st.lists(cplx, min_size=4, max_size=4, unique=True))
def test_cross_ratio_invariance(m, zs):
    if min(abs(a - b) for i, a in enumerate(zs) for b in zs[i + 1:]) < 1e-2:
        return
    images = [m(z) for z in zs]
    if any(isinf(w) or abs(w) > 1e5 for w in images):
        return
    if min(abs(a - b) for i, a in enumerate(images) for b in images[i + 1:]) < 1e-4:
        return
    a, b = cross_ratio(*zs), cross_ratio(*images)
    assert abs(a - b) <= 1e-9 * max(1.0, abs(a))


# ---- hyperbolic space ----

def test_h3_apply_examples():
    p = H3Point(0.3 + 0.1j, 2.0)
    q = h3_apply(MoebiusMap.identity(), p)
    assert q.z == p.z and q.t == p.t
    s = 0.8
    q = h3_apply(MoebiusMap(math.exp(s / 2), 0, 0, math.exp(-s / 2)), BASEPOINT)
    assert abs(q.z) < 1e-15 and abs(q.t - math.exp(s)) < 1e-12
    th = 1.3
    q = h3_apply(MoebiusMap(cmath.exp(0.5j * th), 0, 0, cmath.exp(-0.5j * th)), BASEPOINT)
    assert abs(q.z) < 1e-15 and abs(q.t - 1) < 1e-15


def test_h3_distance_examples():
    p = H3Point(1 + 1j, 0.5)
    assert h3_distance(p, p) == 0
    assert abs(h3_distance(BASEPOINT, H3Point(0, math.e)) - 1) < 1e-12


@settings(max_examples=200)
@given(maps(), h3points(), h3points())
def test_h3_isometry(m, p, q):
    d0 = h3_distance(p, q)
    d1 = h3_distance(h3_apply(m, p), h3_apply(m, q))
    assert abs(d0 - d1) <= 1e-9 * max(1.0, d0)


@given(h3points(), h3points(), h3points())
def test_h3_triangle_inequality(p, q, r):
    assert h3_distance(p, r) <= h3_distance(p, q) + h3_distance(q, r) + 1e-12


@given(h3points(), h3points())
def test_h3_distance_symmetric(p, q):
    assert h3_distance(p, q) == pytest.approx(h3_distance(q, p), abs=1e-12)


# ---- Busemann ----

def test_busemann_at_infinity_examples():
    p = H3Point(0.2, 1.3)
    assert busemann_at_infinity(p, p) == 0
    s = 1.7
    q = H3Point(0, math.exp(s))
    assert abs(busemann_at_infinity(BASEPOINT, q) - s) < 1e-12
    # finite-geodesic limit oracle
    S = 40.0
    far = H3Point(0, math.exp(S))
    assert abs(h3_distance(far, BASEPOINT) - h3_distance(far, q) - s) < 1e-6


def test_busemann_general_matches_geodesic_limit():
    xi = 0.7 - 0.4j
    p, q = H3Point(0.1, 0.8), H3Point(-1 + 1j, 2.0)
    # points marching to xi along the vertical geodesic above it
    far = H3Point(xi, 1e-9)
    limit = h3_distance(far, p) - h3_distance(far, q)
    assert abs(busemann(xi, p, q) - limit) < 1e-6


@given(cplx, h3points(), h3points(), h3points())
def test_busemann_cocycle(xi, p, q, w):
    total = busemann(xi, p, q) + busemann(xi, q, w)
    assert abs(total - busemann(xi, p, w)) < 1e-9


@pytest.mark.parametrize("xi", [0.3 + 0.2j, 2 - 1j, -0.5j, 4.0])
def test_radon_nikodym_sanity(xi):
    # the spherical area distortion of g at xi equals exp(2 beta_xi(o, g^-1 o));
    # measured by finite differences of chordal distances
    s = 0.9
    g = MoebiusMap(math.exp(s / 2), 0, 0, math.exp(-s / 2))
    b = busemann(xi, BASEPOINT, h3_apply(g.inverse(), BASEPOINT))

    def chordal(z, w):
        return 2 * abs(z - w) / math.sqrt((1 + abs(z) ** 2) * (1 + abs(w) ** 2))

    h = 1e-6
    ratios = [chordal(g(xi + h * u), g(xi - h * u)) / chordal(xi + h * u, xi - h * u) for u in (1, 1j)]
    jac_fd = ratios[0] * ratios[1]
    assert abs(jac_fd - math.exp(2 * b)) < 1e-6 * math.exp(2 * b)
    assert abs(spherical_derivative(g, xi) ** 2 - math.exp(2 * b)) < 1e-9


def test_array_forms_agree():
    from packlab.moebius import busemann_arrays, h3_apply_arrays, h3_distance_arrays

    rng = np.random.default_rng(0)
    m = MoebiusMap(1 + 1j, 0.5, -0.2j, 1)
    z = rng.normal(size=5) + 1j * rng.normal(size=5)
    t = rng.uniform(0.2, 2, size=5)
    zz, tt = h3_apply_arrays(m.a, m.b, m.c, m.d, z, t)
    for i in range(5):
        p = h3_apply(m, H3Point(z[i], t[i]))
        assert abs(p.z - zz[i]) < 1e-12 and abs(p.t - tt[i]) < 1e-12
        assert abs(h3_distance_arrays(z[i], t[i], 0j, 1.0) - h3_distance(H3Point(z[i], t[i]), BASEPOINT)) < 1e-12
        xi = 0.4 + 0.1j
        assert abs(busemann_arrays(xi, z[i], t[i], 0j, 1.0) - busemann(xi, H3Point(z[i], t[i]), BASEPOINT)) < 1e-9
