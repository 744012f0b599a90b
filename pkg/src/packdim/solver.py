"""Root finding for the bounding series and Table-style reproduction runs.

``bounds`` builds the cutoff set for a row (packing, m, kappa), solves
``g = 1`` for the lower bound and ``f = 1`` for the upper bound (the
basic variant uses the tilde series), and reports residuals, iteration
counts and the gap certificate.  Values are reported truncated, not
rounded, to six decimals.
"""

from __future__ import annotations

import json
import math
import os
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .flatset import FlatSet, build_flat, eval_flat
from .necklace import Triple
from .scalars import QuadSurd
from .series import (FAST, RIGOROUS_LOWER, RIGOROUS_UPPER, SeriesParams,
                     eval_series)
from .tripleset import s_iterate

BETA0 = QuadSurd(3, 2)  # 3 + 2*sqrt(2), the m = 0 stabilization cutoff

RESIDUAL_TOL = 1e-7


class NoBracket(ArithmeticError):
    """No sign change of series - 1 found in the search window."""


class Stagnation(ArithmeticError):
    """Root iteration failed to reach the residual tolerance."""


def beta_cutoff(m: int) -> QuadSurd:
    """beta_m = (3 + 2 sqrt 2)^(m+1); floor(beta_m) are the table cutoffs."""
    return BETA0 ** (m + 1)


def beta_floor(m: int) -> int:
    b = beta_cutoff(m)
    f = int(b.p) + math.isqrt(2 * int(b.q) * int(b.q))
    # floor(p + q sqrt2) with integer p, q >= 0
    while QuadSurd(f + 1) <= b:
        f += 1
    while QuadSurd(f) > b:
        f -= 1
    return f


def parse_kappa(text: str):
    """Exact cutoff: integer/decimal string or 'b0^k' for beta powers."""
    text = text.strip()
    if text.startswith("b0"):
        k = 1
        if "^" in text:
            k = int(text.split("^", 1)[1])
        return BETA0 ** k
    if "." in text:
        return QuadSurd(Fraction(text))
    return int(text)


def kappa_label(kappa) -> str:
    if isinstance(kappa, QuadSurd):
        if kappa.q == 0 and kappa.p.denominator == 1:
            return str(int(kappa.p))
        # recognize beta powers for a friendly label
        for k in range(1, 12):
            if BETA0 ** k == kappa:
                return f"b0^{k}"
        return str(kappa)
    return str(kappa)


def trunc6(x: float) -> float:
    """Truncate (not round) to six decimals; tolerates float repr noise."""
    return math.floor(x * 1e6 + 1e-3) / 1e6


@dataclass
class BoundResult:
    """One solved row: lower/upper critical-exponent bounds and diagnostics."""

    packing: str
    m: int
    kappa: str
    kappa_float: float
    variant: str                  # improved | basic
    mode: str                     # fast | rigorous
    lam: float
    mu: float
    residual_lambda: float
    residual_mu: float
    iterations: int
    wall_time_s: float
    set_nodes: int = 0
    eps_tail: float = 0.0

    def __post_init__(self):
        if self.lam > self.mu:
            raise ValueError(f"lower bound {self.lam} exceeds upper {self.mu}")

    @property
    def lam_trunc(self) -> float:
        return trunc6(self.lam)

    @property
    def mu_trunc(self) -> float:
        return trunc6(self.mu)

    def gap_bound(self) -> float:
        return 2.3 / math.log(self.kappa_float)

    def to_json_dict(self) -> dict:
        return {
            "packing": self.packing,
            "m": self.m,
            "kappa": self.kappa,
            "variant": self.variant,
            "lambda": self.lam_trunc,
            "mu": self.mu_trunc,
            "residual_lambda": self.residual_lambda,
            "residual_mu": self.residual_mu,
            "gap_bound": self.gap_bound(),
            "wall_time_s": self.wall_time_s,
        }


def gap_check(r: BoundResult, beta_m=None) -> bool:
    """Gap certificate: 0 < mu - lambda < 2.3 / ln(kappa)."""
    if r.kappa_float <= 1:
        raise ValueError("gap certificate needs kappa > 1")
    if beta_m is not None and float(beta_m) < r.kappa_float - 1e-12:
        raise ValueError("gap certificate needs kappa <= beta_m")
    gap = r.mu - r.lam
    return 0.0 < gap < r.gap_bound()


def find_root(series: Callable[[float], float], slope_hint: float,
              t0: float = 1.35, tol: float = RESIDUAL_TOL,
              max_iter: int = 100, constant_slope: bool = False,
              slope_gain: float = 1.5, bracket=None):
    """Solve series(t) = 1 for a strictly decreasing series.

    Default is a safeguarded bracket iteration (secant step, bisection
    fallback); ``constant_slope`` switches to the bare fixed-slope map
    t -> t + A (series(t) - 1)/|slope| for fidelity runs.  An explicit
    ``bracket`` skips the expansion search (useful when evaluations far
    from the root are expensive).  Returns (t, residual, iterations).
    """
    L = max(abs(slope_hint), 0.5)
    cache: dict = {}

    def f(t):
        if t not in cache:
            cache[t] = series(t) - 1.0
        return cache[t]

    if bracket is not None:
        lo, hi = bracket
        flo, fhi = f(lo), f(hi)
        for _ in range(8):
            if flo > 0:
                break
            lo -= (hi - lo)
            flo = f(lo)
        for _ in range(8):
            if fhi < 0:
                break
            hi += (hi - lo)
            fhi = f(hi)
        t0 = 0.5 * (lo + hi)
    else:
        # establish a bracket [lo, hi] with f(lo) > 0 > f(hi)
        lo = hi = t0
        flo = fhi = f(t0)
        step = max(0.5 / L, 0.05)
        for _ in range(60):
            if flo > 0:
                break
            lo = max(0.5009, lo - step)
            flo = f(lo)
            step *= 1.6
            if lo <= 0.501 and flo <= 0:
                raise NoBracket("series stays below 1 down to t = 1/2")
        step = max(0.5 / L, 0.05)
        for _ in range(60):
            if fhi < 0:
                break
            hi = hi + step
            fhi = f(hi)
            step *= 1.6
            if hi > 40:
                raise NoBracket("series stays above 1 far beyond the search window")
    if not (flo > 0 > fhi):
        raise NoBracket(f"no sign change in [{lo}, {hi}]")

    t = t0 if lo < t0 < hi else 0.5 * (lo + hi)
    ft = f(t)
    iters = 0
    prev_t, prev_ft = lo, flo
    while abs(ft) > tol:
        iters += 1
        if iters > max_iter:
            raise Stagnation(f"no convergence after {max_iter} iterations")
        if constant_slope:
            prop = t + slope_gain * ft / L
        else:
            denom = ft - prev_ft
            prop = t - ft * (t - prev_t) / denom if denom != 0 else 0.5 * (lo + hi)
        if not (lo < prop < hi):
            prop = 0.5 * (lo + hi)
        prev_t, prev_ft = t, ft
        t, ft = prop, f(prop)
        if ft > 0:
            lo, flo = t, ft
        else:
            hi, fhi = t, ft
    return t, abs(ft), iters


# ---------------------------------------------------------------------------
# row construction and evaluation
# ---------------------------------------------------------------------------

BM_ROOT = Triple(QuadSurd(0), QuadSurd(1), QuadSurd(1), QuadSurd(1))

_FLAT_CACHE: dict = {}


def _flat_for(packing: str, kappa, max_nodes: int) -> FlatSet:
    key = (packing, kappa_label(kappa))
    if key in _FLAT_CACHE:
        return _FLAT_CACHE[key]
    cache_dir = os.environ.get("PACKDIM_CACHE")
    flat = None
    path = None
    if cache_dir:
        os.makedirs(cache_dir, exist_ok=True)
        path = os.path.join(cache_dir, f"flat-{packing}-{key[1].replace('^', 'p')}.npz")
        if os.path.exists(path):
            from .flatset import load_flat
            flat = load_flat(path)
    if flat is None:
        flat = build_flat(packing, kappa, max_nodes=max_nodes)
        if path:
            from .flatset import save_flat
            save_flat(flat, path)
    _FLAT_CACHE[key] = flat
    return flat


def bounds(packing: str = "bm", m: int = 0, kappa=None, variant: str = "improved",
           mode: str = "fast", params: Optional[SeriesParams] = None,
           max_nodes: int = 6_000_000, constant_slope: bool = False) -> BoundResult:
    """Solve one row: lower bound from g (or g~), upper bound from f (or f~)."""
    if kappa is None:
        kappa = beta_cutoff(m)
    if isinstance(kappa, str):
        kappa = parse_kappa(kappa)
    kf = float(kappa)
    if kf <= 1:
        raise ValueError("cutoff must exceed 1")
    if params is None:
        params = SeriesParams()
    kinds = ("g", "f") if variant == "improved" else ("gt", "ft")
    t_start = time.perf_counter()
    slope = -math.log(max(kf, 2.0))

    fixpoint_ok = (packing == "ap") or not (QuadSurd(0) + kappa > beta_cutoff(m))
    nodes = 0
    if mode == "fast" and fixpoint_ok:
        flat = _flat_for(packing, kappa, max_nodes)
        nodes = flat.node_count
        if packing == "bm" and flat.depth > m:
            raise ValueError(f"cutoff {kappa} needs at least m = {flat.depth}")
        if packing == "ap":
            m = flat.depth  # report the depth the fixpoint actually needed

        def evaluator(kind):
            return lambda t: eval_flat(flat, kind, params, t)
    else:
        if packing == "ap":
            raise ValueError("object-layer Apollonian rows are not supported; "
                             "use the fixpoint path")
        s = s_iterate(kappa, BM_ROOT, m=m, track_weights=False)
        nodes = s.size()

        if mode == "fast":
            def evaluator(kind):
                return lambda t: eval_series(s, kind, params, t)
        elif mode == "rigorous":
            def evaluator(kind):
                side = RIGOROUS_LOWER if kind in ("g", "gt") else RIGOROUS_UPPER
                p = SeriesParams(mode=side, eps_tail=params.eps_tail,
                                 rel_tol=params.rel_tol,
                                 min_terms=params.min_terms,
                                 max_terms=params.max_terms)
                return lambda t: eval_series(s, kind, p, t)
        else:
            raise ValueError(f"unknown mode {mode!r}")

    g_fn = evaluator(kinds[0])
    f_fn = evaluator(kinds[1])
    if mode == "rigorous":
        # locate the roots cheaply first; the rigorous evaluators are only
        # affordable near the root (tail budgets explode as t drops)
        fast = SeriesParams(eps_tail=params.eps_tail, rel_tol=params.rel_tol)
        g_fast = lambda t: eval_series(s, kinds[0], fast, t)
        f_fast = lambda t: eval_series(s, kinds[1], fast, t)
        lam0, _, _ = find_root(g_fast, slope)
        mu0, _, _ = find_root(f_fast, slope)
        lam, res_l, it_l = find_root(g_fn, slope, bracket=(lam0 - 0.01, lam0 + 0.01))
        mu, res_u, it_u = find_root(f_fn, slope, bracket=(mu0 - 0.01, mu0 + 0.01))
    else:
        lam, res_l, it_l = find_root(g_fn, slope, constant_slope=constant_slope)
        mu, res_u, it_u = find_root(f_fn, slope, t0=lam + 0.5 / abs(slope),
                                    constant_slope=constant_slope)

    if mode == "rigorous":
        # certify one-sidedness with a residual-tolerance margin, so the
        # reported interval also swallows any fast-mode root solved to the
        # same |series - 1| < tol target
        margin = 1.2 * RESIDUAL_TOL
        step = 2.0 * RESIDUAL_TOL / abs(slope)
        for _ in range(64):
            if g_fn(lam) >= 1.0 + margin:
                break
            lam -= step
            step *= 2
        res_l = abs(g_fn(lam) - 1.0)
        step = 2.0 * RESIDUAL_TOL / abs(slope)
        for _ in range(64):
            if f_fn(mu) <= 1.0 - margin:
                break
            mu += step
            step *= 2
        res_u = abs(f_fn(mu) - 1.0)

    return BoundResult(
        packing=packing, m=m, kappa=kappa_label(kappa), kappa_float=kf,
        variant=variant, mode=mode, lam=lam, mu=mu,
        residual_lambda=res_l, residual_mu=res_u, iterations=it_l + it_u,
        wall_time_s=time.perf_counter() - t_start,
        set_nodes=nodes, eps_tail=params.eps_tail,
    )


TABLE1_ROWS = (
    (0, "b0^1", True),
    (1, "16", True),
    (1, "33", True),
    (2, "100", True),
    (2, "197", True),
    (3, "1153", True),
    (4, "6725", False),
    (5, "39201", False),
)


def table1(rows=TABLE1_ROWS, mode: str = "fast",
           params: Optional[SeriesParams] = None, progress=None) -> list:
    """All table rows, both variants where reported; returns BoundResults."""
    out = []
    for m, klabel, with_basic in rows:
        kappa = parse_kappa(klabel)
        for variant in (("improved", "basic") if with_basic else ("improved",)):
            r = bounds("bm", m, kappa, variant, mode, params)
            out.append(r)
            if progress:
                progress(r)
    return out


def table1_csv(results) -> str:
    """CSV mirror of the table layout: one line per (m, kappa) row."""
    rows: dict = {}
    for r in results:
        rows.setdefault((r.m, r.kappa), {})[r.variant] = r
    lines = ["m,kappa,lambda_tilde,lambda,mu,mu_tilde"]
    for (m, kappa), d in sorted(rows.items(), key=lambda kv: (kv[0][0], kv[1]["improved"].kappa_float)):
        imp = d.get("improved")
        bas = d.get("basic")
        lines.append(",".join([
            str(m), kappa,
            f"{bas.lam_trunc:.6f}" if bas else "-",
            f"{imp.lam_trunc:.6f}" if imp else "-",
            f"{imp.mu_trunc:.6f}" if imp else "-",
            f"{bas.mu_trunc:.6f}" if bas else "-",
        ]))
    return "\n".join(lines) + "\n"


def results_json(results) -> str:
    return json.dumps([r.to_json_dict() for r in results], indent=2) + "\n"
