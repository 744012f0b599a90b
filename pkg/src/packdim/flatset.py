"""Columnar fixpoint expansion for large cutoffs.

The object layer in :mod:`tripleset` materializes members individually,
which is fine up to a few thousand triples.  Table rows with cutoffs in
the tens of thousands expand hundreds of thousands of sub-triangles, so
this module builds the same multiset in compiled form: one record per
*expanded* triangle (curvatures as exact p + q*sqrt2 integer pairs), a
multiplicity from merging coincident triangles (the expansion is a DAG,
processed in increasing middle curvature so parent counts are final), a
per-family split index, and a retained-mask for the central children.

The retained multiset is never stored explicitly; the evaluator
regenerates coefficient arrays from the node columns with the same
closed forms used everywhere else (:mod:`necklace` works elementwise on
numpy arrays).
"""

from __future__ import annotations

import heapq
import math
from array import array
from dataclasses import dataclass

import numpy as np

from .necklace import SQRT8_FLOAT, ap_families, bm_central, bm_families
from .scalars import QuadSurd
from .series import SeriesParams, family_bases, family_sum_fast, normalize_kind, weight_bases
from .tripleset import BudgetExceeded

_SQRT2 = math.sqrt(2.0)


def _fval(p: int, q: int) -> float:
    return p + q * _SQRT2


def _pair_lt(p, q, kp, kq) -> bool:
    """Exact p + q*sqrt2 < kp + kq*sqrt2 over integers."""
    dp = kp - p
    dq = kq - q
    if dp >= 0 and dq >= 0:
        return dp > 0 or dq > 0
    if dp <= 0 and dq <= 0:
        return False
    if dp > 0:  # dq < 0
        return dp * dp > 2 * dq * dq
    return 2 * dq * dq > dp * dp


def kappa_pair(kappa) -> tuple:
    """Exact cutoff as an integer pair; accepts int or integral QuadSurd."""
    if isinstance(kappa, int):
        return (kappa, 0)
    if isinstance(kappa, QuadSurd):
        if kappa.p.denominator == 1 and kappa.q.denominator == 1:
            return (int(kappa.p), int(kappa.q))
        raise ValueError("cutoff must be integral in Z[sqrt 2] for the compiled path")
    raise TypeError(f"unsupported cutoff {kappa!r}")


@dataclass
class FlatSet:
    """Compiled state of the fixpoint expansion S^inf(kappa; tau(root))."""

    packing: str                 # "bm" | "ap"
    kappa_label: str
    kappa_float: float
    a: np.ndarray                # node curvatures and derived quantity
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    mult: np.ndarray             # node multiplicities (float64-exact counts)
    n0: np.ndarray               # (rows, nodes) first retained family index
    cen_mask: np.ndarray         # (4, nodes) retained central children (bm)
    depth: int                   # deepest expansion level that did work

    @property
    def node_count(self) -> int:
        return len(self.mult)

    def family_count(self) -> int:
        return self.n0.shape[0] * self.node_count


def _quad_at(Aq, Bq, Cq, n):
    return ((Aq[0] * n + Bq[0]) * n + Cq[0], (Aq[1] * n + Bq[1]) * n + Cq[1])


def build_flat(packing: str, kappa, max_nodes: int = 6_000_000,
               root=((0, 0), (1, 0), (1, 0), (1, 0))) -> FlatSet:
    """Expand every triangle with middle curvature below the cutoff.

    Works in exact Z[sqrt 2] integer pairs; coincident triangles merge
    with multiplicity.  Nodes are processed in increasing (middle, max)
    curvature, which follows the expansion DAG topologically.
    """
    kp, kq = kappa_pair(kappa)
    kf = _fval(kp, kq)
    rows = 18 if packing == "bm" else 2

    col_a, col_b, col_c, col_d = (array("d") for _ in range(4))
    col_mult = array("d")
    col_n0 = [array("I") for _ in range(rows)]
    col_cmask = [array("B") for _ in range(4)]

    heap: list = []
    counter = 0
    pending: dict = {}   # key -> [mult, depth]

    def push(vals, mult, depth):
        nonlocal counter
        key = vals
        ent = pending.get(key)
        if ent is not None:
            ent[0] += mult
            if depth > ent[1]:
                ent[1] = depth
            return
        pending[key] = [mult, depth]
        (pa, qa), (pb, qb), (pc, qc), (pd_, qd) = vals
        heapq.heappush(heap, (_fval(pb, qb), _fval(pc, qc), counter, key))
        counter += 1

    push(root, 1, 0)
    max_depth = 0
    popped = 0

    while heap:
        _, _, _, key = heapq.heappop(heap)
        mult, depth = pending.pop(key)
        (pa, qa), (pb, qb), (pc, qc), (pd_, qd) = key
        popped += 1
        if popped > max_nodes:
            raise BudgetExceeded(f"flat expansion exceeded {max_nodes} nodes")
        if depth > max_depth:
            max_depth = depth
        col_a.append(_fval(pa, qa)); col_b.append(_fval(pb, qb))
        col_c.append(_fval(pc, qc)); col_d.append(_fval(pd_, qd))
        col_mult.append(mult)

        s8dp, s8dq = 4 * qd, 2 * pd_   # sqrt8 * d

        if packing == "bm":
            # central children (x, y, z, d'); y = c1 or b1
            c1 = (2 * pa + 2 * pb + pc + s8dp, 2 * qa + 2 * qb + qc + s8dq)
            b1 = (2 * pa + pb + 2 * pc + s8dp, 2 * qa + qb + 2 * qc + s8dq)
            a1 = (pa + 2 * pb + 2 * pc + s8dp, qa + 2 * qb + 2 * qc + s8dq)
            # d' of the four central children: r2*(combo) + 3d / 5d
            def r2(p, q):
                return (2 * q, p)

            cen = (
                ((pa, qa), c1, b1, _padd(r2(2 * pa + pb + pc, 2 * qa + qb + qc), (3 * pd_, 3 * qd))),
                ((pb, qb), c1, a1, _padd(r2(pa + 2 * pb + pc, qa + 2 * qb + qc), (3 * pd_, 3 * qd))),
                ((pc, qc), b1, a1, _padd(r2(pa + pb + 2 * pc, qa + qb + 2 * qc), (3 * pd_, 3 * qd))),
                (c1, b1, a1, _padd(r2(2 * (pa + pb + pc), 2 * (qa + qb + qc)), (5 * pd_, 5 * qd))),
            )
            for i, (x, y, z, dp) in enumerate(cen):
                if _pair_lt(y[0], y[1], kp, kq):
                    col_cmask[i].append(0)
                    push((x, y, z, dp), mult, depth + 1)
                else:
                    col_cmask[i].append(1)

            # three necklaces: flanks (u, v), anchor w, in bm_families row order
            necklaces = (
                ((pb, qb), (pc, qc), (pa, qa), (0, 1, 2, 3, 4, 5)),     # rows 1..6
                ((pa, qa), (pc, qc), (pb, qb), (10, 11, 8, 9, 6, 7)),   # rows 7..12
                ((pa, qa), (pb, qb), (pc, qc), (12, 13, 14, 15, 16, 17)),  # rows 13..18
            )
            for (up, uq), (vp, vq), (wp, wq), slots in necklaces:
                uvp, uvq = up + vp, uq + vq
                # chain and tails as quadratics in n (integer pairs)
                Ak, Bk, Ck = (2 * uvp, 2 * uvq), (s8dp, s8dq), (wp, wq)
                At = (4 * uvp, 4 * uvq)
                Bt = (4 * uvp + 2 * s8dp, 4 * uvq + 2 * s8dq)
                CtU = (2 * up + vp + 2 * wp + s8dp, 2 * uq + vq + 2 * wq + s8dq)
                CtV = (up + 2 * vp + 2 * wp + s8dp, uq + 2 * vq + 2 * wq + s8dq)
                # d' quadratics per generic row type
                r2uv = (2 * uvq, uvp)
                d3 = (3 * pd_, 3 * qd)
                d5 = (5 * pd_, 5 * qd)
                dU = (_pscale(r2uv, 2), _padd(r2uv, (4 * pd_, 4 * qd)),
                      _padd((2 * (uq + wq), up + wp), (pd_, qd)))
                dUs = (_pscale(r2uv, 2), _padd(_pscale(r2uv, 3), (4 * pd_, 4 * qd)),
                       _padd((2 * (2 * uq + vq + wq), 2 * up + vp + wp), d3))
                dM = (_pscale(r2uv, 4), _padd(_pscale(r2uv, 3), (8 * pd_, 8 * qd)),
                      _padd((2 * (uq + vq + 2 * wq), up + vp + 2 * wp), d3))
                dMs = (_pscale(r2uv, 4), _padd(_pscale(r2uv, 5), (8 * pd_, 8 * qd)),
                       _padd((2 * (uq + vq + wq) * 2, 2 * (up + vp + wp)), d5))
                dV = (_pscale(r2uv, 2), _padd(r2uv, (4 * pd_, 4 * qd)),
                      _padd((2 * (vq + wq), vp + wp), (pd_, qd)))
                dVs = (_pscale(r2uv, 2), _padd(_pscale(r2uv, 3), (4 * pd_, 4 * qd)),
                       _padd((2 * (uq + 2 * vq + wq), up + 2 * vp + wp), d3))

                shift = lambda A, B, C: (A, _padd(B, _pscale(A, 2)), _padd(_padd(A, B), C))
                rowdefs = (
                    (( (0,0),(0,0),(up,uq) ), (Ak, Bk, Ck), (At, Bt, CtU), dU),
                    (( (0,0),(0,0),(up,uq) ), shift(Ak, Bk, Ck), (At, Bt, CtU), dUs),
                    ((Ak, Bk, Ck), (At, Bt, CtU), (At, Bt, CtV), dM),
                    (shift(Ak, Bk, Ck), (At, Bt, CtU), (At, Bt, CtV), dMs),
                    (( (0,0),(0,0),(vp,vq) ), (Ak, Bk, Ck), (At, Bt, CtV), dV),
                    (( (0,0),(0,0),(vp,vq) ), shift(Ak, Bk, Ck), (At, Bt, CtV), dVs),
                )
                for slot, (Xq, Yq, Zq, Dq) in zip(slots, rowdefs):
                    n0 = _find_n0(Yq, kp, kq, kf)
                    col_n0[slot].append(n0)
                    for n in range(1, n0):
                        x = _quad_at(*Xq, n) if len(Xq) == 3 else Xq
                        y = _quad_at(*Yq, n)
                        z = _quad_at(*Zq, n)
                        dp = _quad_at(*Dq, n)
                        push((x, y, z, dp), mult, depth + 1)
        else:
            # Apollonian: chain c_n = c + n^2 (a+b) + 2 n d, two families
            for i in range(4):
                col_cmask[i].append(0)
            Ak = (pa + pb, qa + qb)
            Bk = (2 * pd_, 2 * qd)
            Ck = (pc, qc)
            prevB = (Bk[0] - 2 * Ak[0], Bk[1] - 2 * Ak[1])
            prevC = (Ck[0] + Ak[0] - Bk[0], Ck[1] + Ak[1] - Bk[1])
            dB = (2 * pd_ - Ak[0], 2 * qd - Ak[1])
            rowdefs = (
                (((0, 0), (0, 0), (pa, qa)), (Ak, prevB, prevC), (Ak, Bk, Ck),
                 (Ak, dB, (pa + pc - pd_, qa + qc - qd))),
                (((0, 0), (0, 0), (pb, qb)), (Ak, prevB, prevC), (Ak, Bk, Ck),
                 (Ak, dB, (pb + pc - pd_, qb + qc - qd))),
            )
            for slot, (Xq, Yq, Zq, Dq) in enumerate(rowdefs):
                n0 = _find_n0(Yq, kp, kq, kf)
                col_n0[slot].append(n0)
                for n in range(1, n0):
                    x = Xq[2]
                    y = _quad_at(*Yq, n)
                    z = _quad_at(*Zq, n)
                    dp = _quad_at(*Dq, n)
                    push((x, y, z, dp), mult, depth + 1)

    n0_arr = np.array([np.array(col, dtype=np.uint32) for col in col_n0])
    cen = np.array([np.array(colm, dtype=np.uint8) for colm in col_cmask])
    return FlatSet(
        packing=packing,
        kappa_label=str(kappa),
        kappa_float=kf,
        a=np.array(col_a, dtype=float), b=np.array(col_b, dtype=float),
        c=np.array(col_c, dtype=float), d=np.array(col_d, dtype=float),
        mult=np.array(col_mult, dtype=float),
        n0=n0_arr, cen_mask=cen, depth=max_depth,
    )


def _padd(x, y):
    return (x[0] + y[0], x[1] + y[1])


def _pscale(x, s):
    return (x[0] * s, x[1] * s)


def _find_n0(Yq, kp, kq, kf) -> int:
    """First n >= 1 whose middle curvature reaches the cutoff (exact ties kept)."""
    (Ap, Aq), (Bp, Bq), (Cp, Cq) = Yq
    Af, Bf, Cf = _fval(Ap, Aq), _fval(Bp, Bq), _fval(Cp, Cq)
    disc = Bf * Bf - 4.0 * Af * (Cf - kf)
    if disc <= 0:
        n = 1
    else:
        n = max(1, int((-Bf + math.sqrt(disc)) / (2.0 * Af)) - 1)
    while not _pair_lt((Ap * n + Bp) * n + Cp, (Aq * n + Bq) * n + Cq, kp, kq):
        if n == 1:
            return 1
        n -= 1
    # y(n) < kappa here; walk forward to the first retained index
    while _pair_lt((Ap * n + Bp) * n + Cp, (Aq * n + Bq) * n + Cq, kp, kq):
        n += 1
    return n


# ---------------------------------------------------------------------------
# evaluation over compiled sets (fast float mode)
# ---------------------------------------------------------------------------

def eval_flat(flat: FlatSet, kind: str, params: SeriesParams, t: float) -> float:
    """Weight sum of the given kind over the compiled retained multiset."""
    kind = normalize_kind(kind)
    params.require_t(t)
    a, b, c, d, mult = flat.a, flat.b, flat.c, flat.d, flat.mult
    total = 0.0
    if flat.packing == "bm":
        cen = bm_central(a, b, c, d, SQRT8_FLOAT)
        for i, (x, y, z, _dp) in enumerate(cen):
            mask = flat.cen_mask[i].astype(float)
            for base, w in weight_bases(kind, x, y, z):
                total += w * float(np.sum(mult * mask * np.power(base, -t)))
        fams = bm_families(a, b, c, d, SQRT8_FLOAT)
    else:
        fams = ap_families(a, b, c, d)
    for r, fam in enumerate(fams):
        n0 = flat.n0[r].astype(float)
        for quad, w in family_bases(kind, fam):
            A = np.asarray(quad[0], dtype=float) + np.zeros_like(a)
            B = np.asarray(quad[1], dtype=float) + np.zeros_like(a)
            C = np.asarray(quad[2], dtype=float) + np.zeros_like(a)
            total += w * float(np.sum(mult * family_sum_fast(A, B, C, t, n0, params)))
    return total


def save_flat(flat: FlatSet, path: str) -> None:
    np.savez_compressed(
        path, packing=flat.packing, kappa_label=flat.kappa_label,
        kappa_float=flat.kappa_float, a=flat.a, b=flat.b, c=flat.c, d=flat.d,
        mult=flat.mult, n0=flat.n0, cen_mask=flat.cen_mask, depth=flat.depth)


def load_flat(path: str) -> FlatSet:
    z = np.load(path, allow_pickle=False)
    return FlatSet(
        packing=str(z["packing"]), kappa_label=str(z["kappa_label"]),
        kappa_float=float(z["kappa_float"]), a=z["a"], b=z["b"], c=z["c"],
        d=z["d"], mult=z["mult"], n0=z["n0"], cen_mask=z["cen_mask"],
        depth=int(z["depth"]))
