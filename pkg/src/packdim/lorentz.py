"""Lorentz products, reflections and curvature-quadruple solving for 4x4
symmetric separation forms of signature (3,1).

Vectors are plain length-4 sequences of scalars; matrices are 4x4 nested
tuples.  Two forms are built in: ``J_BM`` for the separation-3
(Boyd/Mallows) packing, whose two distinguished faces have product -3, and
``J_APOLLONIAN`` for the mutually tangent configuration.  Both use the
convention of unit spacelike normals (diagonal +1, tangent faces -1), so
the separation of disjoint faces is ``-product``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np

from .scalars import QuadSurd, Scalar, as_exact, sqrt_scalar

Vec4 = Sequence[Scalar]
Mat4 = tuple


class NullNormal(ArithmeticError):
    """Reflection normal with vanishing self-product."""


class NegativeDiscriminant(ArithmeticError):
    """Quadruple equation has no real solution in the free slot."""


class ZeroRadius(ArithmeticError):
    """Separation formula needs strictly positive radii."""


def _mat(rows) -> Mat4:
    return tuple(tuple(r) for r in rows)


def _exact_inverse(m: Mat4) -> Mat4:
    """Gauss-Jordan inverse over Q(sqrt 2); entries must be exact."""
    n = 4
    a = [[as_exact(m[i][j]) for j in range(n)] + [QuadSurd(1 if i == j else 0) for j in range(n)]
         for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != QuadSurd(0)), None)
        if piv is None:
            raise ArithmeticError("singular separation form")
        a[col], a[piv] = a[piv], a[col]
        inv = QuadSurd(1) / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != QuadSurd(0):
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return _mat(row[n:] for row in a)


class SeparationForm:
    """Symmetric signature-(3,1) bilinear form with precomputed inverse."""

    def __init__(self, rows):
        self.J = _mat(rows)
        for i in range(4):
            for j in range(4):
                if self.J[i][j] != self.J[j][i]:
                    raise ValueError("separation form must be symmetric")
        eig = np.linalg.eigvalsh(np.array([[float(x) for x in row] for row in self.J]))
        if sum(e > 0 for e in eig) != 3 or sum(e < 0 for e in eig) != 1:
            raise ValueError(f"signature is not (3,1): eigenvalues {eig}")
        self.Jinv = _exact_inverse(self.J)

    def __repr__(self):
        return f"SeparationForm({self.J})"


# J = (e_i . e_j): unit normals, tangent pairs -1, the separation-3 pair -3.
J_BM = SeparationForm([
    [1, -3, -1, -1],
    [-3, 1, -1, -1],
    [-1, -1, 1, -1],
    [-1, -1, -1, 1],
])

J_APOLLONIAN = SeparationForm([
    [1, -1, -1, -1],
    [-1, 1, -1, -1],
    [-1, -1, 1, -1],
    [-1, -1, -1, 1],
])

E1, E2, E3, E4 = (1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)

# published reflection normals for the Boyd/Mallows packing
N1 = (-1, 1, 2, 2)
N2 = (1, -1, 2, 2)
N3 = (1, 1, -2, 0)
N4 = (3, 1, 2, -2)
N5 = (1, 3, 2, -2)
BM_NORMALS = (N1, N2, N3, N4, N5)

BM_SEEDS = (E1, E2, E3, E4, (1, 1, 0, -1))  # e1 + e2 - e4


def mat_vec(m: Mat4, x: Vec4) -> tuple:
    return tuple(sum(m[i][j] * x[j] for j in range(4)) for i in range(4))


def product(x: Vec4, y: Vec4, form: SeparationForm = J_BM) -> Scalar:
    """Lorentz product x^t J y."""
    jy = mat_vec(form.J, y)
    return sum(xi * yi for xi, yi in zip(x, jy))


def reflect(n: Vec4, x: Vec4, form: SeparationForm = J_BM) -> tuple:
    """Reflection of x through the mirror n: x - 2 (x.n)/(n.n) n."""
    nn = product(n, n, form)
    if nn == 0:
        raise NullNormal(f"normal {n} has zero self-product")
    t = 2 * product(x, n, form) / nn
    return tuple(xi - t * ni for xi, ni in zip(x, n))


def reflection_matrix(n: Vec4, form: SeparationForm = J_BM) -> Mat4:
    """Matrix T with T x = reflect(n, x); satisfies T^t J T = J."""
    nn = product(n, n, form)
    if nn == 0:
        raise NullNormal(f"normal {n} has zero self-product")
    jn = mat_vec(form.J, n)
    rows = []
    for i in range(4):
        rows.append(tuple((1 if i == j else 0) - 2 * n[i] * jn[j] / nn for j in range(4)))
    return _mat(rows)


def mat_mul(a: Mat4, b: Mat4) -> Mat4:
    return _mat(tuple(sum(a[i][k] * b[k][j] for k in range(4)) for j in range(4))
                for i in range(4))


def quadruple_form(k: Vec4, form: SeparationForm = J_BM) -> Scalar:
    """Quadratic form K(k) = k^t J^{-1} k vanishing on curvature quadruples."""
    jk = mat_vec(form.Jinv, k)
    return sum(ki * yi for ki, yi in zip(k, jk))


def quadruple_form_expanded(k: Vec4) -> Scalar:
    """Closed-form expansion of K for J_BM, k = (a, b, c, d).

    Equal to ``quadruple_form(k, J_BM)``; the Descartes-style relation
    K = 0 matches the classical display up to an overall sign.
    """
    a, b, c, d = k
    out = (a * a + b * b) * Fraction(1, 8) + (c * c + d * d) * Fraction(1, 2)
    out = out - a * b * Fraction(1, 4) - (a + b) * (c + d) * Fraction(1, 2)
    return out


def solve_fourth(fixed: Vec4, slot: int, form: SeparationForm = J_BM):
    """Both roots of K = 0 in the free slot, smaller first.

    ``fixed`` is a length-4 vector whose entry at ``slot`` is ignored; the
    other three entries are the known curvatures.  The larger root is the
    curvature of the smaller disk (the new circle of the configuration).
    """
    jinv = form.Jinv
    known = [(j, fixed[j]) for j in range(4) if j != slot]
    qa = jinv[slot][slot]
    qb = 2 * sum(jinv[slot][j] * v for j, v in known)
    qc = sum(vi * jinv[i][j] * vj for i, vi in known for j, vj in known)
    disc = qb * qb - 4 * qa * qc
    neg = disc < 0 if not hasattr(disc, "sign") else disc.sign() < 0
    if neg:
        raise NegativeDiscriminant(f"discriminant {disc} < 0")
    rt = sqrt_scalar(disc)
    r1 = (-qb - rt) / (2 * qa)
    r2 = (-qb + rt) / (2 * qa)
    return (r1, r2) if float(r1) <= float(r2) else (r2, r1)


def separation(r1: Scalar, r2: Scalar, s: Scalar) -> Scalar:
    """Normalized inversive distance (s^2 - r1^2 - r2^2) / (2 r1 r2)."""
    if float(r1) <= 0 or float(r2) <= 0:
        raise ZeroRadius("separation needs positive radii")
    return (s * s - r1 * r1 - r2 * r2) / (2 * r1 * r2)
