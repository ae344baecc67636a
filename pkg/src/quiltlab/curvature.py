"""Total curvature (winding) of polygonal curves.

The total curvature of a polygonal curve is the sum of the signed exterior
angles at its interior vertices (all of them, plus the closure vertex, for
closed curves).  Each angle lies in the open interval (-pi, pi); an exact
cusp of +-pi has no well-defined sign and raises DegenerateSegment.  For a
simple closed curve the total is +-2*pi (the discrete Umlaufsatz), +
counterclockwise.

Every vertex of polygonal data is treated as a regular point; the curves
these routines are applied to are discretizations of curves that are regular
near their endpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    DegenerateSegment,
    HopfViolation,
    NotSimple,
    PathDegeneratesUnderF,
)

HOPF_TOL_PER_VERTEX = 1e-9


@dataclass(frozen=True)
class PolygonalCurve:
    """Ordered planar points; ``closed`` closes implicitly (no repeated point).

    Consecutive vertices must be distinct.  Coordinates are dimensionless.
    """

    vertices: tuple
    closed: bool = False

    def __post_init__(self):
        pts = tuple((float(x), float(y)) for x, y in self.vertices)
        object.__setattr__(self, "vertices", pts)
        if len(pts) < 2:
            raise DegenerateSegment("need at least two vertices")
        for i in range(len(pts) - 1):
            if pts[i] == pts[i + 1]:
                raise DegenerateSegment(f"zero-length segment at index {i}")
        if self.closed and pts[0] == pts[-1]:
            raise DegenerateSegment(
                "closed curves use implicit closure; drop the repeated endpoint"
            )

    @classmethod
    def from_complex(cls, zs, closed=False):
        return cls(vertices=tuple((z.real, z.imag) for z in zs), closed=closed)

    def to_array(self):
        return np.asarray(self.vertices, dtype=float)

    def segments(self):
        pts = self.vertices
        segs = [(pts[i], pts[i + 1]) for i in range(len(pts) - 1)]
        if self.closed:
            segs.append((pts[-1], pts[0]))
        return segs

    def reverse(self):
        return PolygonalCurve(vertices=tuple(reversed(self.vertices)), closed=self.closed)

    @property
    def n_segments(self):
        return len(self.vertices) - 1 + (1 if self.closed else 0)


def _turn(u, w):
    """Signed exterior angle between direction u and direction w, in (-pi, pi)."""
    cross = u[0] * w[1] - u[1] * w[0]
    dot = u[0] * w[0] + u[1] * w[1]
    if cross == 0.0 and dot < 0.0:
        raise DegenerateSegment("exact cusp (turning angle of +-pi)")
    return math.atan2(cross, dot)


def turning_angles(curve: PolygonalCurve):
    """Exterior angles at interior vertices (and the closure vertex if closed)."""
    pts = curve.vertices
    n = len(pts)
    dirs = [(pts[i + 1][0] - pts[i][0], pts[i + 1][1] - pts[i][1]) for i in range(n - 1)]
    if curve.closed:
        dirs.append((pts[0][0] - pts[-1][0], pts[0][1] - pts[-1][1]))
    angles = []
    for i in range(len(dirs) - 1):
        angles.append(_turn(dirs[i], dirs[i + 1]))
    if curve.closed:
        angles.append(_turn(dirs[-1], dirs[0]))
    return angles


def total_turning(curve: PolygonalCurve) -> float:
    """Total curvature of the curve in radians.

    Term-by-term the angles of the reversed curve are the negatives of the
    original ones, and the fsum makes the totals negate exactly.
    """
    if curve.n_segments < 2:
        raise DegenerateSegment("need at least two segments")
    return math.fsum(turning_angles(curve))


# --- exact-orientation segment intersection ------------------------------------

_ORIENT_EPS = 1e-12


def _orient(a, b, c):
    """Sign of the cross product (b-a) x (c-a), exact near degeneracy."""
    det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    scale = max(
        abs(b[0] - a[0]), abs(c[1] - a[1]), abs(b[1] - a[1]), abs(c[0] - a[0]), 1.0
    )
    if abs(det) > _ORIENT_EPS * scale * scale:
        return 1 if det > 0 else -1
    fa = (Fraction(a[0]), Fraction(a[1]))
    fb = (Fraction(b[0]), Fraction(b[1]))
    fc = (Fraction(c[0]), Fraction(c[1]))
    fd = (fb[0] - fa[0]) * (fc[1] - fa[1]) - (fb[1] - fa[1]) * (fc[0] - fa[0])
    return (fd > 0) - (fd < 0)


def _on_segment(a, b, p):
    """p collinear with a-b: is p within the closed segment box?"""
    return (
        min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
        and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
    )


def segments_intersect(p1, p2, q1, q2) -> bool:
    """Closed-segment intersection with exact orientation fallback."""
    o1 = _orient(p1, p2, q1)
    o2 = _orient(p1, p2, q2)
    o3 = _orient(q1, q2, p1)
    o4 = _orient(q1, q2, p2)
    if o1 != o2 and o3 != o4:
        return True
    if o1 == 0 and _on_segment(p1, p2, q1):
        return True
    if o2 == 0 and _on_segment(p1, p2, q2):
        return True
    if o3 == 0 and _on_segment(q1, q2, p1):
        return True
    if o4 == 0 and _on_segment(q1, q2, p2):
        return True
    return False


def is_simple(curve: PolygonalCurve) -> bool:
    """No two non-adjacent segments intersect; adjacent ones only share the
    common endpoint.  O(k^2), fine at desk scale."""
    segs = curve.segments()
    n = len(segs)
    for i in range(n):
        for j in range(i + 1, n):
            adjacent = j == i + 1 or (curve.closed and i == 0 and j == n - 1)
            a, b = segs[i]
            c, d = segs[j]
            if adjacent:
                # shared endpoint allowed; any further contact is a fold-back
                shared = b if j == i + 1 else a
                other_i = a if j == i + 1 else b
                other_j = d if j == i + 1 else c
                if _orient(c, d, other_i) == 0 and _on_segment(c, d, other_i):
                    if other_i != shared:
                        return False
                if _orient(a, b, other_j) == 0 and _on_segment(a, b, other_j):
                    if other_j != shared:
                        return False
                continue
            if segments_intersect(a, b, c, d):
                return False
    return True


def verify_hopf(loop: PolygonalCurve) -> int:
    """Umlaufsatz check: returns +1 (ccw) / -1 (cw) for a simple closed loop.

    Asserts |total turning| = 2*pi within 1e-9 per vertex; raises NotSimple
    or HopfViolation otherwise.
    """
    if not loop.closed:
        raise NotSimple("verify_hopf needs a closed curve")
    if not is_simple(loop):
        raise NotSimple("curve is not simple")
    total = total_turning(loop)
    tol = HOPF_TOL_PER_VERTEX * len(loop.vertices)
    if abs(abs(total) - 2 * math.pi) > tol:
        raise HopfViolation(f"|total turning| = {abs(total)!r} is not 2*pi +- {tol}")
    return 1 if total > 0 else -1


# --- discrete arg f' -----------------------------------------------------------

def map_curve(f, curve: PolygonalCurve) -> PolygonalCurve:
    """Apply a complex map pointwise; consecutive collisions are an error."""
    zs = [complex(x, y) for x, y in curve.vertices]
    ws = [complex(f(z)) for z in zs]
    for i in range(len(ws) - 1):
        if ws[i] == ws[i + 1]:
            raise PathDegeneratesUnderF(f"image points {i} and {i + 1} coincide")
    return PolygonalCurve.from_complex(ws, closed=curve.closed)


def discrete_arg_derivative(f, base, base_arg, target, path: PolygonalCurve) -> float:
    """Continuation of arg f' from ``base`` to ``target`` along ``path``:

        arg f'(target) = base_arg + w(f o path) - w(path)

    where w is total turning.  ``f`` maps complex to complex and must be
    injective on the path.
    """
    base = complex(base)
    target = complex(target)
    first = complex(*path.vertices[0])
    last = complex(*path.vertices[-1])
    if abs(first - base) > 1e-12 * max(1.0, abs(base)):
        raise ValueError("path does not start at base")
    if abs(last - target) > 1e-12 * max(1.0, abs(target)):
        raise ValueError("path does not end at target")
    image = map_curve(f, path)
    return base_arg + total_turning(image) - total_turning(path)


# --- fixture helpers -------------------------------------------------------------

def regular_polygon(k: int, ccw=True, radius=1.0, center=(0.0, 0.0)) -> PolygonalCurve:
    pts = []
    for i in range(k):
        a = 2 * math.pi * i / k
        pts.append((center[0] + radius * math.cos(a), center[1] + radius * math.sin(a)))
    if not ccw:
        pts.reverse()
    return PolygonalCurve(vertices=tuple(pts), closed=True)


def star_polygon(k: int, rng, jitter=0.45, ccw=True) -> PolygonalCurve:
    """Random star-shaped polygon: radial jitter guarantees simplicity."""
    pts = []
    for i in range(k):
        a = 2 * math.pi * i / k
        r = 1.0 + jitter * (2.0 * rng.random() - 1.0)
        pts.append((r * math.cos(a), r * math.sin(a)))
    if not ccw:
        pts.reverse()
    return PolygonalCurve(vertices=tuple(pts), closed=True)


def circular_arc(z0: complex, z1: complex, k: int, ccw=True) -> PolygonalCurve:
    """Polyline along the origin-centered circular arc from z0 to z1."""
    r0, a0 = abs(z0), math.atan2(z0.imag, z0.real)
    a1 = math.atan2(z1.imag, z1.real)
    if ccw and a1 <= a0:
        a1 += 2 * math.pi
    if not ccw and a1 >= a0:
        a1 -= 2 * math.pi
    angles = [a0 + (a1 - a0) * i / k for i in range(k + 1)]
    zs = [r0 * complex(math.cos(a), math.sin(a)) for a in angles]
    return PolygonalCurve.from_complex(zs)
