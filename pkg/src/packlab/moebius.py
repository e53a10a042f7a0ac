"""Inversive geometry on the Riemann sphere and the upper half-space model of H^3.

Points of the sphere are plain Python complex numbers, with ``INF`` standing
for the point at infinity.  Maps are stored det-normalized; circles are stored
as Hermitian coefficient triples ``(A, B, C)`` describing the locus

    A |z|^2 + conj(B) z + B conj(z) + C = 0

so that lines and circles share one type and Moebius transport is a single
congruence ``H -> M^{-*} H M^{-1}``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateQuadruple

INF = complex(math.inf, 0.0)

ALGEBRAIC_TOL = 1e-12
SAMPLED_TOL = 1e-9
LIMIT_TOL = 1e-6


def isinf(z: complex) -> bool:
    return cmath.isinf(z)


def _check_point(z: complex) -> complex:
    z = complex(z)
    if cmath.isnan(z):
        raise ValueError("sphere point has a NaN component")
    return INF if cmath.isinf(z) else z


# --------------------------------------------------------------------------
# Moebius maps

@dataclass(frozen=True, eq=False)
class MoebiusMap:
    """Element of PSL(2, C) stored with ``ad - bc = 1``.

    The constructor rescales any invertible matrix to determinant one, so
    ``MoebiusMap(2, 0, 0, 1)`` is the map ``z -> 2z``.  Equality is projective.
    """

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        a, b, c, d = (complex(x) for x in (self.a, self.b, self.c, self.d))
        det = a * d - b * c
        if abs(det) == 0.0 or not cmath.isfinite(det):
            raise ValueError("singular matrix does not define a Moebius map")
        s = cmath.sqrt(det)
        for name, v in zip("abcd", (a, b, c, d)):
            object.__setattr__(self, name, v / s)

    @classmethod
    def identity(cls) -> "MoebiusMap":
        return cls(1, 0, 0, 1)

    @classmethod
    def from_array(cls, m) -> "MoebiusMap":
        m = np.asarray(m, dtype=complex)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @classmethod
    def from_three_points(cls, z1, z2, z3) -> "MoebiusMap":
        """Map sending ``z1, z2, z3`` to ``0, 1, INF``."""
        z1, z2, z3 = (_check_point(z) for z in (z1, z2, z3))
        if isinf(z1):
            return cls(0, z2 - z3, 1, -z3)
        if isinf(z2):
            return cls(1, -z1, 1, -z3)
        if isinf(z3):
            return cls(1, -z1, 0, z2 - z1)
        return cls(z2 - z3, -z1 * (z2 - z3), z2 - z1, -z3 * (z2 - z1))

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> complex:
        return self.a + self.d

    def inverse(self) -> "MoebiusMap":
        return MoebiusMap(self.d, -self.b, -self.c, self.a)

    def __matmul__(self, other: "MoebiusMap") -> "MoebiusMap":
        return MoebiusMap(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __call__(self, z):
        return apply_point(self, z)

    def __eq__(self, other):
        if not isinstance(other, MoebiusMap):
            return NotImplemented
        return projectively_equal(self, other)

    __hash__ = None

    def __repr__(self):
        return f"MoebiusMap({self.a:.6g}, {self.b:.6g}, {self.c:.6g}, {self.d:.6g})"


def projectively_equal(m1: MoebiusMap, m2: MoebiusMap, tol: float = ALGEBRAIC_TOL) -> bool:
    """True when ``m1 = +-m2`` entrywise within ``tol``."""
    x, y = m1.matrix.ravel(), m2.matrix.ravel()
    return bool(np.max(np.abs(x - y)) <= tol or np.max(np.abs(x + y)) <= tol)


def apply_point(m: MoebiusMap, z: complex) -> complex:
    z = _check_point(z)
    if isinf(z):
        return INF if m.c == 0 else m.a / m.c
    den = m.c * z + m.d
    if den == 0:
        return INF
    return (m.a * z + m.b) / den


def derivative(m: MoebiusMap, z: complex) -> complex:
    """Complex derivative ``1 / (cz + d)^2`` at a finite point."""
    return 1.0 / (m.c * z + m.d) ** 2


def spherical_derivative(m: MoebiusMap, z: complex) -> float:
    """Stretch factor of ``m`` at ``z`` for the spherical metric ``2|dz|/(1+|z|^2)``."""
    z = _check_point(z)
    if isinf(z):
        return 1.0 / (abs(m.a) ** 2 + abs(m.c) ** 2)
    return (1 + abs(z) ** 2) / (abs(m.a * z + m.b) ** 2 + abs(m.c * z + m.d) ** 2)


def fixed_points(m: MoebiusMap) -> tuple[complex, complex]:
    """Both fixed points, attracting one first when ``m`` is loxodromic.

    Fixed points solve ``c z^2 + (d - a) z - b = 0``; the attracting one is
    the root where ``|m'| < 1``.
    """
    a, b, c, d = m.a, m.b, m.c, m.d
    if c == 0:
        z0 = b / (d - a) if d != a else INF
        # m(z) = (a z + b) / d, so m' = a / d everywhere
        if abs(a) < abs(d):
            return z0, INF
        return INF, z0
    disc = cmath.sqrt((d - a) ** 2 + 4 * b * c)
    r1 = ((a - d) + disc) / (2 * c)
    r2 = ((a - d) - disc) / (2 * c)
    if abs(derivative(m, r1)) <= abs(derivative(m, r2)):
        return r1, r2
    return r2, r1


def is_loxodromic(m: MoebiusMap, tol: float = 1e-9) -> bool:
    t = m.trace
    return abs(t.imag) > tol or abs(t.real) > 2 + tol


# --------------------------------------------------------------------------
# Generalized circles

@dataclass(frozen=True, eq=False)
class GeneralizedCircle:
    """Circle or line ``A|z|^2 + conj(B) z + B conj(z) + C = 0``.

    Stored canonically: ``|B|^2 - AC = 1``, ``A > 0`` for circles, and for
    lines (``A = 0``) ``|B| = 1`` with the sign of ``B`` fixed.
    """

    A: float
    B: complex
    C: float

    def __post_init__(self):
        A, B, C = float(self.A), complex(self.B), float(self.C)
        disc = abs(B) ** 2 - A * C
        if not disc > 0:
            raise ValueError("degenerate circle: |B|^2 - AC must be positive")
        s = math.sqrt(disc)
        A, B, C = A / s, B / s, C / s
        if abs(A) < 1e-14 * max(1.0, abs(B), abs(C)):
            A = 0.0
        flip = A < 0 or (A == 0 and (B.real < 0 or (B.real == 0 and B.imag < 0)))
        if flip:
            A, B, C = -A, -B, -C
        if A == 0.0:
            B = B / abs(B)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)

    @classmethod
    def from_center_radius(cls, center: complex, radius: float) -> "GeneralizedCircle":
        if not radius > 0:
            raise ValueError("radius must be positive")
        center = complex(center)
        return cls(1.0, -center, abs(center) ** 2 - radius ** 2)

    @classmethod
    def line_through(cls, p: complex, q: complex) -> "GeneralizedCircle":
        p, q = complex(p), complex(q)
        if p == q:
            raise ValueError("need two distinct points")
        n = 1j * (q - p)  # normal direction
        # conj(B) z + B conj(z) = 2 Re(conj(B) z); choose B = n
        return cls(0.0, n, -2 * (n.conjugate() * p).real)

    @property
    def is_line(self) -> bool:
        return self.A == 0.0

    @property
    def center(self) -> complex:
        if self.is_line:
            return INF
        return -self.B / self.A

    @property
    def radius(self) -> float:
        return math.inf if self.is_line else 1.0 / self.A

    @property
    def hermitian(self) -> np.ndarray:
        return np.array([[self.A, self.B], [self.B.conjugate(), self.C]], dtype=complex)

    def evaluate(self, z: complex) -> float:
        """Value of the defining form at ``z`` (zero on the locus)."""
        z = complex(z)
        return self.A * abs(z) ** 2 + 2 * (self.B.conjugate() * z).real + self.C

    def sample(self, n: int = 16, phase: float = 0.0) -> np.ndarray:
        """``n`` points on the locus (finite; lines are sampled near their foot point)."""
        theta = phase + 2 * np.pi * np.arange(n) / n
        if self.is_line:
            foot = -self.C * self.B / (2 * abs(self.B) ** 2)
            direction = 1j * self.B
            return foot + direction * np.tan((theta - np.pi) / 2.0001)
        return self.center + self.radius * np.exp(1j * theta)

    def __eq__(self, other):
        if not isinstance(other, GeneralizedCircle):
            return NotImplemented
        return (
            abs(self.A - other.A) <= ALGEBRAIC_TOL
            and abs(self.B - other.B) <= ALGEBRAIC_TOL
            and abs(self.C - other.C) <= ALGEBRAIC_TOL
        )

    __hash__ = None

    def __repr__(self):
        if self.is_line:
            return f"GeneralizedCircle(line B={self.B:.6g}, C={self.C:.6g})"
        return f"GeneralizedCircle(center={self.center:.6g}, radius={self.radius:.6g})"


def apply_circle(m: MoebiusMap, c: GeneralizedCircle) -> GeneralizedCircle:
    inv = m.inverse().matrix
    h = inv.conj().T @ c.hermitian @ inv
    return GeneralizedCircle(h[0, 0].real, h[0, 1], h[1, 1].real)


def invert_point(c: GeneralizedCircle, z: complex) -> complex:
    """Reflection in the circle (or line) ``c``; fixes ``c`` pointwise."""
    z = _check_point(z)
    if isinf(z):
        return INF if c.is_line else c.center
    den = c.A * z.conjugate() + c.B.conjugate()
    if den == 0:
        return INF
    return -(c.B * z.conjugate() + c.C) / den


def cross_ratio(z1, z2, z3, z4) -> complex:
    """``(z1-z3)(z2-z4) / ((z1-z4)(z2-z3))`` with the limits at ``INF``.

    Real exactly when the four points are concyclic.
    """
    pts = [_check_point(z) for z in (z1, z2, z3, z4)]
    for i in range(4):
        for j in range(i + 1, 4):
            if pts[i] == pts[j]:
                raise DegenerateQuadruple(f"points {i + 1} and {j + 1} coincide")
    z1, z2, z3, z4 = pts
    if isinf(z1):
        return (z2 - z4) / (z2 - z3)
    if isinf(z2):
        return (z1 - z3) / (z1 - z4)
    if isinf(z3):
        return (z2 - z4) / (z1 - z4)
    if isinf(z4):
        return (z1 - z3) / (z2 - z3)
    return ((z1 - z3) * (z2 - z4)) / ((z1 - z4) * (z2 - z3))


# --------------------------------------------------------------------------
# Upper half-space

@dataclass(frozen=True)
class H3Point:
    z: complex
    t: float

    def __post_init__(self):
        object.__setattr__(self, "z", complex(self.z))
        object.__setattr__(self, "t", float(self.t))
        if not (self.t > 0 and math.isfinite(self.t)):
            raise ValueError("height must be positive and finite")
        if not cmath.isfinite(self.z):
            raise ValueError("horizontal coordinate must be finite")


BASEPOINT = H3Point(0j, 1.0)


def h3_apply(m: MoebiusMap, p: H3Point) -> H3Point:
    """Poincare extension of ``m`` acting on the upper half-space."""
    w = m.c * p.z + m.d
    t2 = p.t * p.t
    den = abs(w) ** 2 + abs(m.c) ** 2 * t2
    z = ((m.a * p.z + m.b) * w.conjugate() + m.a * m.c.conjugate() * t2) / den
    return H3Point(z, p.t / den)


def h3_apply_arrays(a, b, c, d, z, t):
    """Vectorized ``h3_apply`` over arrays of matrix entries and points."""
    w = c * z + d
    t2 = t * t
    den = np.abs(w) ** 2 + np.abs(c) ** 2 * t2
    zz = ((a * z + b) * np.conj(w) + a * np.conj(c) * t2) / den
    return zz, t / den


def h3_distance(p: H3Point, q: H3Point) -> float:
    num = abs(p.z - q.z) ** 2 + (p.t - q.t) ** 2
    return math.acosh(1.0 + num / (2.0 * p.t * q.t))


def h3_distance_arrays(z1, t1, z2, t2):
    num = np.abs(z1 - z2) ** 2 + (t1 - t2) ** 2
    return np.arccosh(1.0 + num / (2.0 * t1 * t2))


def busemann_at_infinity(p: H3Point, q: H3Point) -> float:
    """``beta_inf(p, q) = lim d(xi_s, p) - d(xi_s, q)`` along the ray to infinity."""
    return math.log(q.t) - math.log(p.t)


def to_infinity(xi: complex) -> MoebiusMap:
    """A fixed Moebius map sending the boundary point ``xi`` to ``INF``."""
    xi = _check_point(xi)
    if isinf(xi):
        return MoebiusMap.identity()
    return MoebiusMap(0, -1, 1, -xi)


def busemann(xi: complex, p: H3Point, q: H3Point) -> float:
    """Busemann cocycle at a boundary point, computed by transport to infinity."""
    m = to_infinity(xi)
    return busemann_at_infinity(h3_apply(m, p), h3_apply(m, q))


def busemann_arrays(xi, zp, tp, zq, tq):
    """Closed-form Busemann values for finite ``xi`` (arrays broadcast).

    Uses ``beta_xi(x, y) = log P(xi, y) - log P(xi, x)`` with the Poisson-type
    kernel ``P(xi, (z, t)) = t / (|z - xi|^2 + t^2)``.
    """
    px = tp / (np.abs(zp - xi) ** 2 + tp ** 2)
    py = tq / (np.abs(zq - xi) ** 2 + tq ** 2)
    return np.log(py) - np.log(px)
