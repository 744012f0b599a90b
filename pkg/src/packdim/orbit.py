"""Reflection-group orbit enumeration with a height cutoff.

The five published mirror normals generate a discrete reflection group
acting on the five seed faces.  Orbit vectors are ranked by the height
functional ``h(x) = 4 x1 + 4 x2 + 2 x3 + 2 x4``; breadth-first search
retains exactly the vectors reachable through successors of height below
the cutoff, deduplicated on the raw integer 4-vector.  The cumulative
count N(h) grows like a power of h whose exponent estimates the packing's
critical exponent.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .lorentz import BM_NORMALS, BM_SEEDS, J_BM, reflection_matrix

HEIGHT_COEFFS = (4, 4, 2, 2)


class MemoryBudget(RuntimeError):
    """Orbit enumeration crossed the configured vector budget."""


class DegenerateData(ValueError):
    """Regression input with fewer than two distinct heights."""


def height(v) -> int:
    """The ranking functional 4 x1 + 4 x2 + 2 x3 + 2 x4."""
    return 4 * v[0] + 4 * v[1] + 2 * v[2] + 2 * v[3]


def generator_matrices() -> tuple:
    """Integer reflection matrices of the five published normals."""
    mats = []
    for n in BM_NORMALS:
        t = reflection_matrix(n, J_BM)
        rows = tuple(tuple(int(x) for x in row) for row in t)
        for row, orig in zip(rows, t):
            for xi, oi in zip(row, orig):
                if xi != oi:
                    raise ArithmeticError(f"non-integer generator entry for {n}")
        mats.append(rows)
    return tuple(mats)


@dataclass
class OrbitResult:
    count: int
    heights: np.ndarray   # sorted int64 heights, one per distinct vector
    vectors: np.ndarray | None = None   # (count, 4) int64, when requested


_PACK_OFF = 1 << 24
_PACK_BITS = 25
_PACK_MASK = (1 << _PACK_BITS) - 1


def _pack(v0: int, v1: int, v2: int, v3: int) -> int:
    return ((v0 + _PACK_OFF)
            | (v1 + _PACK_OFF) << _PACK_BITS
            | (v2 + _PACK_OFF) << (2 * _PACK_BITS)
            | (v3 + _PACK_OFF) << (3 * _PACK_BITS))


def _unpack(k: int) -> tuple:
    return ((k & _PACK_MASK) - _PACK_OFF,
            (k >> _PACK_BITS & _PACK_MASK) - _PACK_OFF,
            (k >> (2 * _PACK_BITS) & _PACK_MASK) - _PACK_OFF,
            (k >> (3 * _PACK_BITS) & _PACK_MASK) - _PACK_OFF)


def orbit_bfs(hmax: int, seeds=BM_SEEDS, max_vectors: int = 50_000_000,
              keep_nonpositive: bool = False, keep_vectors: bool = False) -> OrbitResult:
    """Distinct orbit vectors reachable through half-heights below ``hmax``.

    A successor is enqueued only if ``height(w)/2`` is strictly below the
    cutoff (and positive, unless ``keep_nonpositive``); the seeds obey
    the same rule.  The half-height convention reproduces the published
    count of 13,244,370 vectors at hmax = 2**19 exactly, so it pins the
    cutoff semantics (the ranking functional itself is unscaled).
    Deduplication is exact, on the integer 4-vector.
    """
    if hmax < 2:
        raise ValueError("cutoff below the smallest seed heights")
    gens = generator_matrices()
    h2max = 2 * hmax
    seen: set = set()
    frontier: list = []
    for s in seeds:
        v = tuple(int(x) for x in s)
        h = height(v)
        if h >= h2max or (h <= 0 and not keep_nonpositive):
            continue
        k = _pack(*v)
        if k not in seen:
            seen.add(k)
            frontier.append(k)
    while frontier:
        nxt: list = []
        for k in frontier:
            v0, v1, v2, v3 = _unpack(k)
            for g in gens:
                r0, r1, r2, r3 = g
                w0 = r0[0] * v0 + r0[1] * v1 + r0[2] * v2 + r0[3] * v3
                w1 = r1[0] * v0 + r1[1] * v1 + r1[2] * v2 + r1[3] * v3
                w2 = r2[0] * v0 + r2[1] * v1 + r2[2] * v2 + r2[3] * v3
                w3 = r3[0] * v0 + r3[1] * v1 + r3[2] * v2 + r3[3] * v3
                h = 4 * w0 + 4 * w1 + 2 * w2 + 2 * w3
                if h >= h2max or (h <= 0 and not keep_nonpositive):
                    continue
                kw = _pack(w0, w1, w2, w3)
                if kw not in seen:
                    seen.add(kw)
                    nxt.append(kw)
        if len(seen) > max_vectors:
            raise MemoryBudget(f"orbit exceeded {max_vectors} vectors")
        frontier = nxt
    heights = np.fromiter(
        (4 * a + 4 * b + 2 * c + 2 * d for a, b, c, d in map(_unpack, seen)),
        dtype=np.int64, count=len(seen))
    heights.sort()
    vectors = None
    if keep_vectors:
        vectors = np.array(sorted(_unpack(k) for k in seen), dtype=np.int64)
    return OrbitResult(count=len(seen), heights=heights, vectors=vectors)


def fit_exponent(heights: np.ndarray, use_rank: bool = False):
    """Least-squares power-law fit of the counting function, log-log.

    Default regresses the cumulative count N(h) = #{v : height <= h}
    against h over the distinct heights; ``use_rank`` regresses the rank
    of each sorted vector instead (same data, one point per vector).
    Returns (a, b) for N ~ a * h^b.
    """
    heights = np.asarray(heights, dtype=np.int64)
    if heights.size < 2 or heights.min() <= 0:
        raise DegenerateData("need at least two positive heights")
    if use_rank:
        hs = heights.astype(float)
        ns = np.arange(1, heights.size + 1, dtype=float)
    else:
        hs, counts = np.unique(heights, return_counts=True)
        if hs.size < 2:
            raise DegenerateData("need at least two distinct heights")
        hs = hs.astype(float)
        ns = np.cumsum(counts).astype(float)
    lx, ly = np.log(hs), np.log(ns)
    b, loga = np.polyfit(lx, ly, 1)
    return float(np.exp(loga)), float(b)


# ---------------------------------------------------------------------------
# external formats
# ---------------------------------------------------------------------------

_MAGIC = b"PKDORB\x00\x01"   # 8 bytes: magic + version


def save_heights(res: OrbitResult, path: str) -> None:
    """Little-endian i64 heights behind a 16-byte header (magic, count)."""
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<Q", res.count))
        fh.write(res.heights.astype("<i8").tobytes())


def load_heights(path: str) -> OrbitResult:
    with open(path, "rb") as fh:
        head = fh.read(16)
        if head[:8] != _MAGIC:
            raise ValueError("not an orbit height dump")
        (count,) = struct.unpack("<Q", head[8:])
        data = np.frombuffer(fh.read(), dtype="<i8")
    if len(data) != count:
        raise ValueError("truncated orbit height dump")
    return OrbitResult(count=count, heights=data.astype(np.int64))


def histogram_csv(res: OrbitResult, bucket: int = 1024) -> str:
    """CSV of (height bucket upper edge, cumulative count)."""
    lines = ["height,cumulative_count"]
    if res.count:
        hmax = int(res.heights[-1])
        edges = np.arange(bucket, hmax + bucket, bucket, dtype=np.int64)
        cum = np.searchsorted(res.heights, edges, side="right")
        for e, c in zip(edges, cum):
            lines.append(f"{e},{c}")
    return "\n".join(lines) + "\n"
