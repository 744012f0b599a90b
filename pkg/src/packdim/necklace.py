"""Necklace curvature formulas for the separation-3 packing.

A curvilinear triangle T(a,b,c) (0 <= a <= b <= c, b > 0) subdivides into
three necklaces.  The chain opposite C has center curvatures
``c_n = c + 2 n^2 (a+b) + n sqrt8 d`` with ``d = sqrt(ab+ac+bc)``, flanked
by left/right tail disks; the chains opposite A and B follow by symmetry.
One subdivision step produces 4 central sub-triangles plus 18 infinite
n-indexed families of sub-triangles.

Everything is written against generic arithmetic, so the same code serves
floats, exact Q(sqrt 2) elements, outward-rounded intervals and numpy
arrays.  Each family row carries closed forms for its three curvatures
x(n) <= y(n) <= z(n) (quadratics in n) and for the derived quantity
d' = sqrt(xy + xz + yz) of the realized member, which turns out to be
linear in the parent data (a,b,c,d) with coefficients quadratic in n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .scalars import Interval, QuadSurd, Scalar, sqrt_scalar

SQRT8_EXACT = QuadSurd(0, 2)
SQRT8_FLOAT = math.sqrt(8.0)


def sqrt8_like(d: Scalar):
    """sqrt(8) in the realization of d."""
    if isinstance(d, QuadSurd):
        return SQRT8_EXACT
    if isinstance(d, Interval):
        return SQRT8_EXACT.to_interval()
    return SQRT8_FLOAT


@dataclass(frozen=True)
class Triple:
    """Sorted curvature triple with its derived quantity d = sqrt(ab+ac+bc)."""

    a: Scalar
    b: Scalar
    c: Scalar
    d: Scalar = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        a, b, c = self.a, self.b, self.c
        if not (float(a) <= float(b) <= float(c)):
            raise ValueError(f"triple must be sorted ascending: {a}, {b}, {c}")
        if float(a) < 0 or float(b) <= 0:
            raise ValueError("need 0 <= a <= b <= c with b > 0")
        if self.d is None:
            object.__setattr__(self, "d", sqrt_scalar(a * b + a * c + b * c))

    def scaled(self, alpha: Scalar) -> "Triple":
        return Triple(self.a * alpha, self.b * alpha, self.c * alpha, self.d * alpha)

    def as_floats(self) -> tuple:
        return (float(self.a), float(self.b), float(self.c), float(self.d))

    def __iter__(self):
        return iter((self.a, self.b, self.c))


def child_curvatures(t: Triple):
    """First chain disks (a1, b1, c1) of the three necklaces; c1 <= b1 <= a1."""
    a, b, c, d = t.a, t.b, t.c, t.d
    s8d = sqrt8_like(d) * d
    return a + 2 * b + 2 * c + s8d, 2 * a + b + 2 * c + s8d, 2 * a + 2 * b + c + s8d


def necklace_center(t: Triple, n: int) -> Scalar:
    """Curvature of the n-th center disk opposite C; n = 0 gives c itself."""
    a, b, c, d = t.a, t.b, t.c, t.d
    return c + 2 * n * n * (a + b) + n * sqrt8_like(d) * d


def necklace_sides(t: Triple, n: int):
    """(c_nl, c_nr): tail disks beside the n-th chain gap opposite C, n >= 1.

    The left tail is tangent to A (separation 3 from B), the right tail
    tangent to B; swapping a and b swaps the two.
    """
    if n < 1:
        raise ValueError("side disks are indexed from n = 1")
    a, b, c, d = t.a, t.b, t.c, t.d
    common = 4 * (n * n + n) * (a + b) + (2 * n + 1) * sqrt8_like(d) * d
    return 2 * a + b + 2 * c + common, a + 2 * b + 2 * c + common


# ---------------------------------------------------------------------------
# quadratic-in-n helpers (coefficients (A, B, C) meaning A n^2 + B n + C)
# ---------------------------------------------------------------------------

def quad_eval(q, n):
    A, B, C = q
    return (A * n + B) * n + C


def quad_shift(q):
    """Same sequence evaluated at n+1."""
    A, B, C = q
    return (A, B + 2 * A, A + B + C)


def quad_add(p, q):
    return (p[0] + q[0], p[1] + q[1], p[2] + q[2])


def quad_scale(p, s):
    return (p[0] * s, p[1] * s, p[2] * s)


def quad_const(v):
    return (0, 0, v)


@dataclass(frozen=True)
class FamilyForm:
    """One n-indexed sub-triangle family of a subdivision step.

    Components are quadratics in n with x(n) <= y(n) <= z(n) for n >= 1;
    ``dprime`` is the member's own derived quantity sqrt(xy + xz + yz).
    """

    row: int
    x: tuple
    y: tuple
    z: tuple
    dprime: tuple

    def member(self, n: int):
        return (quad_eval(self.x, n), quad_eval(self.y, n), quad_eval(self.z, n),
                quad_eval(self.dprime, n))


def bm_central(a, b, c, d, s8):
    """The 4 central sub-triangles (x, y, z, d') of one subdivision step."""
    s8d = s8 * d
    a1 = a + 2 * b + 2 * c + s8d
    b1 = 2 * a + b + 2 * c + s8d
    c1 = 2 * a + 2 * b + c + s8d
    r2 = s8 / 2
    return (
        (a, c1, b1, r2 * (2 * a + b + c) + 3 * d),
        (b, c1, a1, r2 * (a + 2 * b + c) + 3 * d),
        (c, b1, a1, r2 * (a + b + 2 * c) + 3 * d),
        (c1, b1, a1, 2 * r2 * (a + b + c) + 5 * d),
    )


def bm_families(a, b, c, d, s8) -> tuple:
    """The 18 n-indexed sub-triangle families of one subdivision step."""
    r2 = s8 / 2
    s8d = s8 * d

    def chain(u, v, w):
        # center disks between the u and v circles, marching away from w
        return (2 * (u + v), s8d, w)

    def tail(u, v, w, near, far):
        # tangent to `near` and the chain gap, separation 3 from `far`
        return (4 * (u + v), 4 * (u + v) + 2 * s8d, 2 * near + far + 2 * w + s8d)

    an, al, ar = chain(b, c, a), tail(b, c, a, b, c), tail(b, c, a, c, b)
    bn, br, bl = chain(a, c, b), tail(a, c, b, a, c), tail(a, c, b, c, a)
    cn, cl, cr = chain(a, b, c), tail(a, b, c, a, b), tail(a, b, c, b, a)

    def dp_outer(u, v, n1, n2):
        return (2 * r2 * (u + v), r2 * (u + v) + 4 * d, r2 * (n1 + n2) + d)

    def dp_outer_shift(u, v, combo):
        return (2 * r2 * (u + v), 3 * r2 * (u + v) + 4 * d, r2 * combo + 3 * d)

    def dp_mid(u, v, w):
        return (4 * r2 * (u + v), 3 * r2 * (u + v) + 8 * d, r2 * (2 * w + u + v) + 3 * d)

    def dp_mid_shift(u, v, w):
        return (4 * r2 * (u + v), 5 * r2 * (u + v) + 8 * d, 2 * r2 * (u + v + w) + 5 * d)

    return (
        # a-necklace, between B and C
        FamilyForm(1, quad_const(b), an, al, dp_outer(b, c, a, b)),
        FamilyForm(2, quad_const(b), quad_shift(an), al, dp_outer_shift(b, c, a + 2 * b + c)),
        FamilyForm(3, an, al, ar, dp_mid(b, c, a)),
        FamilyForm(4, quad_shift(an), al, ar, dp_mid_shift(b, c, a)),
        FamilyForm(5, quad_const(c), an, ar, dp_outer(b, c, a, c)),
        FamilyForm(6, quad_const(c), quad_shift(an), ar, dp_outer_shift(b, c, a + b + 2 * c)),
        # b-necklace, between A and C
        FamilyForm(7, quad_const(c), bn, bl, dp_outer(a, c, b, c)),
        FamilyForm(8, quad_const(c), quad_shift(bn), bl, dp_outer_shift(a, c, a + b + 2 * c)),
        FamilyForm(9, bn, br, bl, dp_mid(a, c, b)),
        FamilyForm(10, quad_shift(bn), br, bl, dp_mid_shift(a, c, b)),
        FamilyForm(11, quad_const(a), bn, br, dp_outer(a, c, b, a)),
        FamilyForm(12, quad_const(a), quad_shift(bn), br, dp_outer_shift(a, c, 2 * a + b + c)),
        # c-necklace, between A and B
        FamilyForm(13, quad_const(a), cn, cl, dp_outer(a, b, c, a)),
        FamilyForm(14, quad_const(a), quad_shift(cn), cl, dp_outer_shift(a, b, 2 * a + b + c)),
        FamilyForm(15, cn, cl, cr, dp_mid(a, b, c)),
        FamilyForm(16, quad_shift(cn), cl, cr, dp_mid_shift(a, b, c)),
        FamilyForm(17, quad_const(b), cn, cr, dp_outer(a, b, c, b)),
        FamilyForm(18, quad_const(b), quad_shift(cn), cr, dp_outer_shift(a, b, a + 2 * b + c)),
    )


def h0_sequences(a, b, c, d, s8) -> dict:
    """The nine disk-curvature sequences (quadratics in n, summed from n=1)."""
    fams = {f.row: f for f in bm_families(a, b, c, d, s8)}
    return {
        "a_n": fams[1].y, "a_nl": fams[3].y, "a_nr": fams[3].z,
        "b_n": fams[7].y, "b_nr": fams[9].y, "b_nl": fams[9].z,
        "c_n": fams[13].y, "c_nl": fams[15].y, "c_nr": fams[15].z,
    }


# ---------------------------------------------------------------------------
# Apollonian analogue
# ---------------------------------------------------------------------------

def ap_chain(t: Triple, n: int) -> Scalar:
    """n-th disk of the chain tangent to A and B; n = 0 gives c itself.

    Consecutive quadruples (a, b, c_{n-1}, c_n) satisfy the Descartes
    relation.
    """
    a, b, c, d = t.a, t.b, t.c, t.d
    return c + n * n * (a + b) + 2 * n * d


def ap_families(a, b, c, d) -> tuple:
    """Apollonian step: two families (a, c_{n-1}, c_n) and (b, c_{n-1}, c_n)."""
    cn = (a + b, 2 * d, c)
    cprev = (a + b, 2 * d - 2 * (a + b), c + (a + b) - 2 * d)
    dp_a = (a + b, 2 * d - a - b, a + c - d)
    dp_b = (a + b, 2 * d - a - b, b + c - d)
    return (
        FamilyForm(1, quad_const(a), cprev, cn, dp_a),
        FamilyForm(2, quad_const(b), cprev, cn, dp_b),
    )
