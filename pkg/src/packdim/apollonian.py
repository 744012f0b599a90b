"""Apollonian analogues of the bounding machinery.

The tangent-chain decomposition replaces the separation-3 necklace: a
triangle T(a,b,c) holds the inscribed chain ``c_n = c + n^2 (a+b) + 2nd``
running into the A-B tangency point, plus the two sub-triangle families
(a, c_{n-1}, c_n) and (b, c_{n-1}, c_n).  Every consecutive quadruple
(a, b, c_{n-1}, c_n) satisfies the Descartes relation, which doubles as
the construction's consistency oracle.
"""

from __future__ import annotations

from typing import Optional

from .necklace import Triple, ap_chain, ap_families
from .lorentz import J_APOLLONIAN, quadruple_form
from .series import SeriesParams
from .solver import BoundResult, bounds
from .tripleset import TripleSet, tau

__all__ = ["ap_chain", "ap_families", "ap_tau", "ap_bounds",
            "descartes_residual", "AP_ROOT"]

AP_ROOT = Triple(0, 1, 1, 1)


def ap_tau(t: Triple, track_weights: bool = True) -> TripleSet:
    """One chain subdivision: two n-indexed families, no concrete members."""
    return tau(t, geometry="ap", track_weights=track_weights)


def descartes_residual(t: Triple, n: int) -> float:
    """K_A on the consecutive chain quadruple (a, b, c_{n-1}, c_n)."""
    k = (t.a, t.b, ap_chain(t, n - 1), ap_chain(t, n))
    return float(quadruple_form([float(x) for x in k], J_APOLLONIAN))


def ap_bounds(kappa: int = 166464, params: Optional[SeriesParams] = None,
              max_nodes: int = 20_000_000) -> BoundResult:
    """Iterate the cutoff expansion to its fixpoint on T(0,1,1) and solve.

    Uses the same improved-inequality series as the separation-3 case
    (their proof needs only that the packing sum is decreasing,
    homogeneous and symmetric).  The reported m is the expansion depth
    reached before stabilizing.
    """
    return bounds("ap", m=0, kappa=kappa, variant="improved", mode="fast",
                  params=params, max_nodes=max_nodes)
