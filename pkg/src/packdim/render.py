"""Inversive-coordinate realization of orbit vectors and SVG output.

A circle is stored in Lorentz-normalized inversive coordinates
(curvature k, cocurvature kbar, k*center); lines carry curvature 0 with
a unit normal and twice the signed offset as cocurvature.  With that
convention the norm ``cx^2 + cy^2 - k*kbar`` is 1 for every face, the
pairwise product of tangent faces is -1, and the two distinguished faces
of the separation-3 configuration have product -3, matching the Gram
matrix of the separation form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .lorentz import BM_NORMALS, J_BM, mat_vec, product, reflection_matrix

_SQRT2 = math.sqrt(2.0)


class NotACircle(ValueError):
    """Inversive norm check failed beyond tolerance."""


@dataclass(frozen=True)
class InversiveCircle:
    """Oriented circle/line in normalized inversive coordinates."""

    curvature: float      # signed; 0 means a line
    cocurvature: float
    cx_scaled: float      # curvature * center_x (unit normal x for lines)
    cy_scaled: float

    @staticmethod
    def from_circle(curvature: float, cx: float, cy: float) -> "InversiveCircle":
        k = curvature
        kbar = (cx * cx + cy * cy) * k - 1.0 / k if k else 0.0
        # kbar = (|c|^2 - r^2) / r with r = 1/k
        return InversiveCircle(k, kbar, k * cx, k * cy)

    @staticmethod
    def from_line(nx: float, ny: float, offset: float) -> "InversiveCircle":
        """Line n.p = offset with unit normal (nx, ny)."""
        nrm = math.hypot(nx, ny)
        return InversiveCircle(0.0, 2.0 * offset / nrm, nx / nrm, ny / nrm)

    @property
    def is_line(self) -> bool:
        return self.curvature == 0.0

    @property
    def radius(self) -> float:
        if self.is_line:
            return math.inf
        return abs(1.0 / self.curvature)

    @property
    def center(self) -> tuple:
        if self.is_line:
            raise NotACircle("a line has no center")
        return (self.cx_scaled / self.curvature, self.cy_scaled / self.curvature)

    def norm(self) -> float:
        return (self.cx_scaled ** 2 + self.cy_scaled ** 2
                - self.curvature * self.cocurvature)

    def __add__(self, other):
        return InversiveCircle(self.curvature + other.curvature,
                               self.cocurvature + other.cocurvature,
                               self.cx_scaled + other.cx_scaled,
                               self.cy_scaled + other.cy_scaled)

    def scale(self, s: float) -> "InversiveCircle":
        return InversiveCircle(s * self.curvature, s * self.cocurvature,
                               s * self.cx_scaled, s * self.cy_scaled)


def inversive_product(p: InversiveCircle, q: InversiveCircle) -> float:
    """Bilinear form with self-product 1; tangent faces give -1."""
    return (p.cx_scaled * q.cx_scaled + p.cy_scaled * q.cy_scaled
            - 0.5 * (p.curvature * q.cocurvature + p.cocurvature * q.curvature))


@dataclass(frozen=True)
class BaseConfiguration:
    """Inversive realizations of the four basis faces e1..e4."""

    faces: tuple  # four InversiveCircles

    def gram(self) -> list:
        return [[inversive_product(a, b) for b in self.faces] for a in self.faces]


def base_circles() -> BaseConfiguration:
    """The separation-3 configuration: r1 = r2 = 1/2, centers sqrt2 apart.

    e3 is the line y = 0 (normal pointing down, away from the strip),
    e4 the line y = 1; e1 and e2 are the two radius-1/2 disks pinned at
    x = 0 and x = sqrt2.
    """
    e1 = InversiveCircle.from_circle(2.0, 0.0, 0.5)
    e2 = InversiveCircle.from_circle(2.0, _SQRT2, 0.5)
    e3 = InversiveCircle.from_line(0.0, -1.0, 0.0)
    e4 = InversiveCircle.from_line(0.0, 1.0, 1.0)
    return BaseConfiguration((e1, e2, e3, e4))


def vector_to_circle(v: Sequence[float], base: BaseConfiguration | None = None,
                     tol: float = 1e-9) -> InversiveCircle:
    """Linear extension of the base assignment to an orbit vector."""
    if base is None:
        base = base_circles()
    out = InversiveCircle(0.0, 0.0, 0.0, 0.0)
    for vi, face in zip(v, base.faces):
        out = out + face.scale(float(vi))
    nrm = out.norm()
    if abs(nrm - 1.0) > tol:
        raise NotACircle(f"inversive norm {nrm} departs from 1")
    return out


def orbit_circles(vectors: Iterable[Sequence[int]],
                  base: BaseConfiguration | None = None) -> list:
    if base is None:
        base = base_circles()
    return [vector_to_circle(v, base) for v in vectors]


def mirror_circles(base: BaseConfiguration | None = None) -> list:
    """The five generating mirrors, normalized to unit inversive norm."""
    if base is None:
        base = base_circles()
    out = []
    for n in BM_NORMALS:
        nn = product(n, n, J_BM)
        s = 1.0 / math.sqrt(float(nn))
        out.append(vector_to_circle([s * x for x in n], base))
    return out


# ---------------------------------------------------------------------------
# SVG output
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{x:.6f}".rstrip("0").rstrip(".")


def render_svg(circles: Sequence[InversiveCircle], viewport=( -1.5, -0.25, 4.5, 1.25),
               r_min: float = 1e-3, width: int = 900, labels: bool = False,
               dotted: Sequence[InversiveCircle] = (), stroke: str = "#222",
               fill: str = "none") -> str:
    """Deterministic SVG: one element per circle with radius >= r_min.

    Lines are clipped to the viewport; ``dotted`` circles render dashed
    (used for generating symmetries).  Curvature labels are optional.
    """
    x0, y0, x1, y1 = viewport
    if r_min <= 0:
        raise ValueError("r_min must be positive")
    w = x1 - x0
    h = y1 - y0
    scale = width / w
    height = int(round(h * scale))

    def X(x):
        return (x - x0) * scale

    def Y(y):
        return (y1 - y) * scale  # flip: SVG y grows downward

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
    ]

    def emit(c: InversiveCircle, dash: bool):
        style = f'stroke="{stroke}" fill="{fill}" stroke-width="1"'
        if dash:
            style += ' stroke-dasharray="4 3"'
        if c.is_line:
            nx, ny, off = c.cx_scaled, c.cy_scaled, 0.5 * c.cocurvature
            # clip n.p = off against the viewport
            pts = []
            for (ax, ay, bx, by) in ((x0, y0, x1, y0), (x1, y0, x1, y1),
                                     (x1, y1, x0, y1), (x0, y1, x0, y0)):
                dx, dy = bx - ax, by - ay
                den = nx * dx + ny * dy
                if den == 0:
                    continue
                t = (off - nx * ax - ny * ay) / den
                if 0 <= t <= 1:
                    pts.append((ax + t * dx, ay + t * dy))
            if len(pts) >= 2:
                (ax, ay), (bx, by) = pts[0], pts[-1]
                parts.append(f'<line x1="{_fmt(X(ax))}" y1="{_fmt(Y(ay))}" '
                             f'x2="{_fmt(X(bx))}" y2="{_fmt(Y(by))}" {style}/>')
            return
        r = c.radius
        if r < r_min:
            return
        cx, cy = c.center
        if cx + r < x0 or cx - r > x1 or cy + r < y0 or cy - r > y1:
            return
        parts.append(f'<circle cx="{_fmt(X(cx))}" cy="{_fmt(Y(cy))}" '
                     f'r="{_fmt(r * scale)}" {style}/>')
        if labels:
            k = c.curvature
            txt = str(int(round(k))) if abs(k - round(k)) < 1e-6 else f"{k:.2f}"
            fs = max(min(r * scale * 0.6, 18.0), 2.0)
            parts.append(f'<text x="{_fmt(X(cx))}" y="{_fmt(Y(cy))}" '
                         f'font-size="{_fmt(fs)}" text-anchor="middle" '
                         f'dominant-baseline="central">{txt}</text>')

    for c in circles:
        emit(c, False)
    for c in dotted:
        emit(c, True)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
