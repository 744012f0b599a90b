"""Command-line interface: bounds, table1, orbit, render.

Every command writes its artifacts to files (JSON/CSV/SVG/binary) and
prints a one-line summary; ``--plot`` attaches a matplotlib figure next
to the delimited output on the report paths.  Runs are deterministic for
a fixed configuration.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .series import SeriesParams
from .solver import (BoundResult, bounds, parse_kappa, results_json, table1,
                     table1_csv)


def _fail(msg: str, code: int = 2) -> int:
    sys.stderr.write(json.dumps({"error": msg}) + "\n")
    return code


def _params(args) -> SeriesParams:
    return SeriesParams(eps_tail=args.eps_tail, rel_tol=args.rel_tol)


def cmd_bounds(args) -> int:
    try:
        kappa = parse_kappa(args.kappa) if args.kappa else None
        r = bounds(args.packing, args.m, kappa, args.variant,
                   "rigorous" if args.rigorous else "fast", _params(args),
                   constant_slope=args.constant_slope)
    except Exception as e:  # argument/domain problems become error records
        return _fail(f"{type(e).__name__}: {e}")
    payload = results_json([r])
    if args.out:
        Path(args.out).write_text(payload)
    else:
        sys.stdout.write(payload)
    print(f"bounds {r.packing} m={r.m} kappa={r.kappa} {r.variant}/{r.mode}: "
          f"lambda={r.lam_trunc:.6f} mu={r.mu_trunc:.6f} "
          f"(residuals {r.residual_lambda:.1e}/{r.residual_mu:.1e}, "
          f"{r.wall_time_s:.1f}s)", file=sys.stderr)
    return 0


def cmd_table1(args) -> int:
    from .solver import TABLE1_ROWS
    rows = TABLE1_ROWS
    if args.max_m is not None:
        rows = tuple(r for r in rows if r[0] <= args.max_m)
    results = []

    def progress(r: BoundResult):
        print(f"  row m={r.m} kappa={r.kappa} {r.variant}: "
              f"lambda={r.lam_trunc:.6f} mu={r.mu_trunc:.6f} ({r.wall_time_s:.1f}s)",
              file=sys.stderr)

    try:
        results = table1(rows, "fast", _params(args), progress=progress)
    except Exception as e:
        return _fail(f"{type(e).__name__}: {e}")
    out = Path(args.out or "table1.csv")
    out.write_text(table1_csv(results))
    out.with_suffix(".json").write_text(results_json(results))
    if args.plot:
        _plot_table(results, out.with_suffix(".png"))
    print(f"table1: {len(results)} solved rows -> {out}", file=sys.stderr)
    return 0


def _plot_table(results, path) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for variant, marker in (("improved", "o"), ("basic", "s")):
        rs = [r for r in results if r.variant == variant]
        if not rs:
            continue
        ks = [r.kappa_float for r in rs]
        ax.plot(ks, [r.lam for r in rs], marker + "-", label=f"lower ({variant})")
        ax.plot(ks, [r.mu for r in rs], marker + "--", label=f"upper ({variant})")
    ax.set_xscale("log")
    ax.set_xlabel("cutoff")
    ax.set_ylabel("critical exponent bounds")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def cmd_orbit(args) -> int:
    from .orbit import fit_exponent, histogram_csv, orbit_bfs, save_heights
    t0 = time.time()
    try:
        res = orbit_bfs(args.hmax, max_vectors=args.max_vectors)
    except Exception as e:
        return _fail(f"{type(e).__name__}: {e}")
    out = Path(args.out or "orbit")
    wrote = []
    if args.format in ("bin", "both"):
        save_heights(res, str(out.with_suffix(".bin")))
        wrote.append(str(out.with_suffix(".bin")))
    if args.format in ("csv", "both"):
        out.with_suffix(".csv").write_text(histogram_csv(res))
        wrote.append(str(out.with_suffix(".csv")))
    a, b = fit_exponent(res.heights, use_rank=args.rank_fit)
    if args.plot:
        _plot_orbit(res, a, b, out.with_suffix(".png"))
        wrote.append(str(out.with_suffix(".png")))
    print(f"orbit hmax={args.hmax}: {res.count} vectors, fit N ~ {a:.4f} h^{b:.6f} "
          f"({time.time()-t0:.1f}s) -> {', '.join(wrote) or 'stdout'}", file=sys.stderr)
    if not wrote:
        sys.stdout.write(histogram_csv(res))
    return 0


def _plot_orbit(res, a, b, path) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    import numpy as np

    hs, counts = np.unique(res.heights, return_counts=True)
    ns = np.cumsum(counts)
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.loglog(hs, ns, ".", ms=2, label="cumulative count")
    ax.loglog(hs, a * hs.astype(float) ** b, "-", lw=1,
              label=f"fit: {a:.3f} h^{b:.5f}")
    ax.set_xlabel("height")
    ax.set_ylabel("N(height)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def cmd_render(args) -> int:
    from .orbit import orbit_bfs
    from .render import mirror_circles, orbit_circles, render_svg
    try:
        res = orbit_bfs(args.hmax, keep_vectors=True)
        circles = orbit_circles(res.vectors)
        dotted = mirror_circles() if args.symmetries else ()
        viewport = tuple(float(x) for x in args.viewport.split(","))
        if len(viewport) != 4:
            raise ValueError("viewport needs x0,y0,x1,y1")
        svg = render_svg(circles, viewport=viewport, r_min=args.rmin,
                         labels=args.labels, dotted=dotted)
    except Exception as e:
        return _fail(f"{type(e).__name__}: {e}")
    out = Path(args.out or "packing.svg")
    out.write_text(svg)
    print(f"render: {len(circles)} faces (hmax={args.hmax}) -> {out}", file=sys.stderr)
    return 0


def cmd_apollonian(args) -> int:
    from .apollonian import ap_bounds
    try:
        r = ap_bounds(args.kappa, _params(args))
    except Exception as e:
        return _fail(f"{type(e).__name__}: {e}")
    payload = results_json([r])
    if args.out:
        Path(args.out).write_text(payload)
    else:
        sys.stdout.write(payload)
    print(f"apollonian kappa={r.kappa}: lambda={r.lam_trunc:.6f} "
          f"mu={r.mu_trunc:.6f} (depth {r.m}, {r.wall_time_s:.1f}s)", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="packdim",
                                description="circle-packing dimension bounds")
    p.add_argument("--version", action="version", version=f"packdim {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--eps-tail", type=float, default=1e-10)
        sp.add_argument("--rel-tol", type=float, default=1e-9)
        sp.add_argument("--out", type=str, default=None)

    b = sub.add_parser("bounds", help="lower/upper bounds for one row")
    b.add_argument("--packing", choices=("bm", "apollonian"), default="bm")
    b.add_argument("--m", type=int, default=0)
    b.add_argument("--kappa", type=str, default=None,
                   help="integer, decimal, or b0^k for cutoff powers")
    b.add_argument("--variant", choices=("improved", "basic"), default="improved")
    b.add_argument("--rigorous", action="store_true")
    b.add_argument("--constant-slope", action="store_true",
                   help="use the bare fixed-slope iteration instead of the bracket")
    common(b)
    b.set_defaults(fn=cmd_bounds)

    t = sub.add_parser("table1", help="solve the full bounds table")
    t.add_argument("--max-m", type=int, default=None)
    t.add_argument("--plot", action="store_true")
    common(t)
    t.set_defaults(fn=cmd_table1)

    o = sub.add_parser("orbit", help="reflection-orbit enumeration and fit")
    o.add_argument("--hmax", type=int, required=True)
    o.add_argument("--format", choices=("bin", "csv", "both"), default="both")
    o.add_argument("--max-vectors", type=int, default=50_000_000)
    o.add_argument("--rank-fit", action="store_true")
    o.add_argument("--plot", action="store_true")
    common(o)
    o.set_defaults(fn=cmd_orbit)

    r = sub.add_parser("render", help="SVG rendering of the packing")
    r.add_argument("--hmax", type=int, default=256)
    r.add_argument("--viewport", type=str, default="-1.5,-0.25,4.5,1.25")
    r.add_argument("--rmin", type=float, default=1e-3)
    r.add_argument("--labels", action="store_true")
    r.add_argument("--symmetries", action="store_true",
                   help="overlay the generating mirrors dotted")
    common(r)
    r.set_defaults(fn=cmd_render)

    a = sub.add_parser("apollonian", help="Apollonian cutoff bounds")
    a.add_argument("--kappa", type=int, default=166464)
    common(a)
    a.set_defaults(fn=cmd_apollonian)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "packing", None) == "apollonian":
        args.packing = "ap"
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
