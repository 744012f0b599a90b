"""Evaluation of the bounding series over triple sets.

Four kinds of member weights are supported, written for a sorted triple
(x, y, z):

* ``ft`` (basic upper):  y^-t
* ``gt`` (basic lower):  (x+z)^-t
* ``f``  (improved upper):  ((x+y)^-t + z^-t)/2
* ``g``  (improved lower):  (x + (y+z)/2)^-t

Family tails are quadratics in n, so all series behave like sum n^-2t and
converge for t > 1/2.  Fast mode truncates each tail with a midpoint
Euler-Maclaurin correction (the remaining integral is evaluated through a
Gauss-type hypergeometric expansion), giving ~1e-9 relative accuracy with
a few dozen explicit terms.  Rigorous modes use outward-rounded interval
endpoints: the upper mode adds the shifted-quadratic integral bound
``A^-t (N+s)^(1-2t) / (2t-1)`` for the dropped tail, the lower mode drops
the tail entirely, so [lower, upper] always brackets the true value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .necklace import Triple, h0_sequences, quad_add, quad_eval, sqrt8_like
from .scalars import Interval, QuadSurd
from .tripleset import TripleSet, TrackedTriple, _subdivide

KINDS = ("f", "g", "ft", "gt")
_ALIASES = {"f~": "ft", "g~": "gt", "ftilde": "ft", "gtilde": "gt"}

FAST, RIGOROUS_UPPER, RIGOROUS_LOWER = "fast", "rigorous-upper", "rigorous-lower"

_EPS = np.finfo(float).eps


class DivergentTail(ArithmeticError):
    """Series exponent at or below the harmonic threshold t = 1/2."""


@dataclass
class SeriesParams:
    """Evaluation policy: exponent threshold checks, tail budgets, mode."""

    mode: str = FAST
    eps_tail: float = 1e-10     # absolute per-family budget (rigorous modes)
    rel_tol: float = 1e-9       # relative tail target (fast mode)
    min_terms: int = 12
    max_terms: int = 4_000_000

    def require_t(self, t: float) -> None:
        if t <= 0.5:
            raise DivergentTail(f"series diverge for t = {t} <= 1/2")


def normalize_kind(kind: str) -> str:
    kind = _ALIASES.get(kind, kind)
    if kind not in KINDS:
        raise ValueError(f"unknown series kind {kind!r}")
    return kind


def weight_bases(kind: str, x, y, z):
    """Power bases and coefficients for one member: sum of w * base^-t."""
    if kind == "ft":
        return ((y, 1.0),)
    if kind == "gt":
        return ((x + z, 1.0),)
    if kind == "f":
        return ((x + y, 0.5), (z, 0.5))
    return ((x + (y + z) / 2, 1.0),)


def family_bases(kind: str, fam_form):
    """Same as :func:`weight_bases` on the quadratic coefficient level."""
    X, Y, Z = fam_form.x, fam_form.y, fam_form.z
    if kind == "ft":
        return ((Y, 1.0),)
    if kind == "gt":
        return ((quad_add(X, Z), 1.0),)
    if kind == "f":
        return ((quad_add(X, Y), 0.5), (Z, 0.5))
    yz = quad_add(Y, Z)
    return ((quad_add(X, (yz[0] / 2, yz[1] / 2, yz[2] / 2)), 1.0),)


# ---------------------------------------------------------------------------
# fast tails: midpoint Euler-Maclaurin with hypergeometric integral
# ---------------------------------------------------------------------------

def integral_quad_inv(A, B, C, t: float, X):
    """integral_X^inf (A u^2 + B u + C)^-t du, elementwise on arrays.

    Substituting u -> u + B/2A reduces to int (y^2 + r2)^-t with signed
    r2; the series in z = r2/Y^2 converges fast because |z| stays small
    for every necklace row once a handful of explicit terms are summed.
    """
    A = np.asarray(A, dtype=float)
    p = B / (2.0 * A)
    r2 = C / A - p * p
    Y = X + p
    z = r2 / (Y * Y)
    if np.any(np.abs(z) > 0.5):
        raise FloatingPointError("tail expansion out of its convergence range")
    s = np.zeros_like(Y)
    u = np.ones_like(Y)
    for k in range(64):
        term = u / (2.0 * t + 2.0 * k - 1.0)
        s += term
        u = u * (-(t + k) / (k + 1.0)) * z
        if np.max(np.abs(u)) < 1e-17 * max(np.max(np.abs(s)), 1e-300):
            break
    return np.power(A, -t) * np.power(Y, 1.0 - 2.0 * t) * s


def tail_fast(A, B, C, t: float, n_end):
    """sum_{n > n_end} (A n^2 + B n + C)^-t via midpoint Euler-Maclaurin."""
    X = np.asarray(n_end, dtype=float) + 0.5
    I = integral_quad_inv(A, B, C, t, X)
    Q = (A * X + B) * X + C
    Qp = 2.0 * A * X + B
    f = np.power(Q, -t)
    f1 = -t * f / Q * Qp
    f3 = (-t * (t + 1.0) * (t + 2.0) * f / (Q * Q * Q) * Qp ** 3
          + 3.0 * t * (t + 1.0) * f / (Q * Q) * Qp * 2.0 * A)
    return I + f1 / 24.0 - 7.0 * f3 / 5760.0


def fast_terms_needed(t: float, rel_tol: float, min_terms: int) -> int:
    # dominant truncation term scales like n^-(2t+5); constant from the
    # f^(5) Euler-Maclaurin remainder with a safety factor
    c = 0.05 * (t + 1.0) * (t + 2.0) * (t + 3.0) * (t + 4.0) * (t + 5.0)
    n = (c / max(rel_tol, 1e-15)) ** (1.0 / (2.0 * t + 5.0))
    return max(min_terms, int(math.ceil(n)))


def family_sum_fast(A, B, C, t: float, n0, params: SeriesParams):
    """sum_{n >= n0} (A n^2 + B n + C)^-t, elementwise on arrays."""
    N = fast_terms_needed(t, params.rel_tol, params.min_terms)
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float) + np.zeros_like(A)
    C = np.asarray(C, dtype=float) + np.zeros_like(A)
    n0 = np.asarray(n0, dtype=float) + np.zeros_like(A)
    acc = np.zeros_like(A)
    for k in range(N):
        n = n0 + k
        acc += np.power((A * n + B) * n + C, -t)
    return acc + tail_fast(A, B, C, t, n0 + N - 1.0)


# ---------------------------------------------------------------------------
# rigorous tails: outward-rounded partial sums + shifted integral bound
# ---------------------------------------------------------------------------

def _down(x):
    return np.nextafter(x, -np.inf)


def _up(x):
    return np.nextafter(x, np.inf)


def _ipow_neg(lo, hi, t: float):
    """[lo,hi]^-t for positive bases, widened two ulps for libm slack."""
    plo = _down(_down(np.power(hi, -t)))
    phi = _up(_up(np.power(lo, -t)))
    return plo, phi


def tail_bound_upper(A_lo: float, t: float, n_end: float, shift: float = 0.0) -> float:
    """Rigorous upper bound on sum_{n > n_end} terms, via A (n+s)^2 <= Q(n)."""
    base = float(_up(np.power(_down(np.array(A_lo)), -t)))
    geom = float(_up(np.power(np.array(n_end + shift), 1.0 - 2.0 * t)))
    return float(_up(base * geom / (2.0 * t - 1.0)))


def lower_shift(A: float, B: float, C: float) -> float:
    """Largest easy s with A (n+s)^2 <= A n^2 + B n + C for n >= 1."""
    if B * B >= 4.0 * A * C:
        return math.sqrt(max(C, 0.0) / A)
    return B / (2.0 * A)


def family_sum_rigorous(A: Interval, B: Interval, C: Interval, t: float,
                        n0: int, params: SeriesParams, upper: bool):
    """One family tail as a certified one-sided value (float endpoint)."""
    # choose N so the dropped-tail bound undercuts the budget
    A_lo = max(A.lo, 1e-300)
    s = lower_shift(A.lo, B.lo, C.lo)
    target = params.eps_tail
    est = (A_lo ** -t / ((2.0 * t - 1.0) * target)) ** (1.0 / (2.0 * t - 1.0))
    N = max(params.min_terms, int(est - s) + 1)
    for _ in range(60):
        if tail_bound_upper(A_lo, t, n0 + N - 1, s) < target:
            break
        N *= 2
        if N > params.max_terms:
            raise DivergentTail("rigorous tail budget unreachable within term cap")
    n = np.arange(n0, n0 + N, dtype=float)
    # all quantities positive: endpoint products need no case analysis
    q_lo = _down(_down(A.lo * n + B.lo) * n + C.lo)
    q_hi = _up(_up(A.hi * n + B.hi) * n + C.hi)
    p_lo, p_hi = _ipow_neg(q_lo, q_hi, t)
    if upper:
        ssum = float(np.sum(p_hi))
        ssum = _up(ssum * (1.0 + len(n) * _EPS))
        return float(ssum + tail_bound_upper(A_lo, t, n0 + N - 1, s))
    ssum = float(np.sum(p_lo))
    return float(_down(ssum * (1.0 - len(n) * _EPS)))


def _interval_weight(kind: str, x: Interval, y: Interval, z: Interval, t: float,
                     upper: bool) -> float:
    bases = weight_bases(kind, x, y, z)
    tot = 0.0
    for base, w in bases:
        p_lo, p_hi = _ipow_neg(np.array(base.lo), np.array(base.hi), t)
        tot += w * (float(p_hi) if upper else float(p_lo))
    return float(_up(tot)) if upper else float(_down(tot))


# ---------------------------------------------------------------------------
# evaluation over object-layer triple sets
# ---------------------------------------------------------------------------

def _to_interval(x) -> Interval:
    return Interval.enclose(x)


def eval_series(s: TripleSet, kind: str, params: SeriesParams, t: float) -> float:
    """Weight sum of the given kind over the set members at exponent t.

    Fast mode returns an accurate point value; rigorous-upper /
    rigorous-lower return certified one-sided values computed with
    outward rounding.
    """
    kind = normalize_kind(kind)
    params.require_t(t)
    if params.mode == FAST:
        total = 0.0
        for tt in s.concrete:
            x, y, z = (float(tt.triple.a), float(tt.triple.b), float(tt.triple.c))
            for base, w in weight_bases(kind, x, y, z):
                total += w * base ** -t
        for fam in s.families:
            for q, w in family_bases(kind, fam.form):
                A, B, C = (float(q[0]), float(q[1]), float(q[2]))
                total += w * float(family_sum_fast(A, B, C, t, fam.n_start, params))
        return total

    upper = params.mode == RIGOROUS_UPPER
    if params.mode not in (RIGOROUS_UPPER, RIGOROUS_LOWER):
        raise ValueError(f"unknown mode {params.mode!r}")
    total = 0.0
    pieces = 0
    for tt in s.concrete:
        x, y, z = (_to_interval(tt.triple.a), _to_interval(tt.triple.b),
                   _to_interval(tt.triple.c))
        total += _interval_weight(kind, x, y, z, t, upper)
        pieces += 1
    for fam in s.families:
        for q, w in family_bases(kind, fam.form):
            A, B, C = (_to_interval(q[0]), _to_interval(q[1]), _to_interval(q[2]))
            total += w * family_sum_rigorous(A, B, C, t, fam.n_start, params, upper)
            pieces += 1
    slop = (pieces + 4) * _EPS
    return float(_up(total * (1.0 + slop))) if upper else float(_down(total * (1.0 - slop)))


def eval_h0(t_triple: Triple, params: SeriesParams, t: float) -> float:
    """Disk-curvature sum h0 = sum over the nine necklace sequences."""
    params.require_t(t)
    a, b, c, d = t_triple.as_floats()
    total = 0.0
    for q in h0_sequences(a, b, c, d, math.sqrt(8.0)).values():
        total += float(family_sum_fast(q[0], q[1], q[2], t, 1, params))
    return total


def eval_h(m: int, kappa, t_triple: Triple, params: SeriesParams, t: float) -> float:
    """h_m(kappa; a,b,c; t): accumulated disk contributions of expanded levels."""
    params.require_t(t)
    kf = float(kappa)
    total = eval_h0(t_triple, params, t)
    if m <= 0:
        return total
    tt = TrackedTriple(t_triple, None)
    conc, fams = _subdivide(tt, "bm")
    for child in conc:
        if float(child.middle) < kf:
            total += eval_h(m - 1, kappa, child.triple, params, t)
    for fam in fams:
        n = 1
        while float(fam.member(n).middle) < kf:
            total += eval_h(m - 1, kappa, fam.member(n).triple, params, t)
            n += 1
    return total


def enumerate_curvatures(t_triple: Triple, qmax, track_weights: bool = True,
                         max_disks: int = 1_000_000):
    """All packing-disk curvatures <= qmax inside T, with multiplicity.

    Returns (curvatures, weights): each curvature paired with its weight
    4-tuple over the root data when tracking is enabled.
    """
    from .tripleset import ROOT_WEIGHTS

    qf = float(qmax)
    out_vals: list = []
    out_weights: list = []

    def min_disk(tr: Triple) -> float:
        a, b, c, d = tr.as_floats()
        return 2 * a + 2 * b + c + math.sqrt(8.0) * d

    def rec(tt: TrackedTriple):
        tr = tt.triple
        a, b, c, d = tr.a, tr.b, tr.c, tr.d
        seqs = h0_sequences(a, b, c, d, sqrt8_like(d))
        wseqs = None
        if tt.weights is not None:
            from .necklace import SQRT8_EXACT
            wseqs = h0_sequences(*tt.weights, SQRT8_EXACT)
        for name, q in seqs.items():
            n = 1
            while float(quad_eval(q, n)) <= qf:
                out_vals.append(quad_eval(q, n))
                if wseqs is not None:
                    out_weights.append(quad_eval(wseqs[name], n))
                if len(out_vals) > max_disks:
                    raise RuntimeError("disk budget exceeded")
                n += 1
        conc, fams = _subdivide(tt, "bm")
        for child in conc:
            if min_disk(child.triple) <= qf:
                rec(child)
        for fam in fams:
            n = 1
            while True:
                child = fam.member(n)
                if min_disk(child.triple) > qf:
                    break
                rec(child)
                n += 1

    root = TrackedTriple(t_triple, ROOT_WEIGHTS if track_weights else None)
    rec(root)
    order = sorted(range(len(out_vals)), key=lambda i: float(out_vals[i]))
    vals = [out_vals[i] for i in order]
    weights = [out_weights[i] for i in order] if out_weights else None
    return vals, weights
