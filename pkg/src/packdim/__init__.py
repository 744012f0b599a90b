"""Rigorous residual-set dimension bounds for the separation-3
(Boyd/Mallows) and Apollonian circle packings."""

__version__ = "0.1.0"

from .necklace import Triple, ap_chain, child_curvatures, necklace_center, necklace_sides
from .scalars import Interval, QuadSurd, sqrt_scalar
from .series import SeriesParams, eval_h, eval_h0, eval_series, enumerate_curvatures
from .solver import BoundResult, bounds, find_root, gap_check, table1
from .tripleset import TripleSet, s_iterate, s_step, tau

__all__ = [
    "Triple", "TripleSet", "Interval", "QuadSurd", "SeriesParams", "BoundResult",
    "ap_chain", "bounds", "child_curvatures", "enumerate_curvatures", "eval_h",
    "eval_h0", "eval_series", "find_root", "gap_check", "necklace_center",
    "necklace_sides", "s_iterate", "s_step", "sqrt_scalar", "table1", "tau",
]
