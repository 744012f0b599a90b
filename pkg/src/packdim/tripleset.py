"""Triple-set state for the cutoff iteration S^m(kappa; tau(a,b,c)).

A :class:`TripleSet` holds finitely many concrete triples plus the
parametric necklace families (infinite n-indexed tails).  ``s_step``
replaces every member whose middle curvature is below the cutoff by its
own subdivision; families are split at the first retained index.  Sets
are multisets: coincident members (frequent at symmetric roots) are kept
with multiplicity.

Each tracked triple also carries weight vectors expressing its curvatures
and derived quantity over the root data (a,b,c,d); the weights make the
disk cache exact and exhibit every curvature as a positive combination
w1*a + w2*b + w3*c + w4*d.
"""

from __future__ import annotations

import csv
import io
import struct
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .necklace import (FamilyForm, Triple, ap_families, bm_central, bm_families,
                       quad_eval, sqrt8_like, SQRT8_EXACT)
from .scalars import QuadSurd, Scalar, as_exact


class BudgetExceeded(RuntimeError):
    """Set construction crossed the configured size cap."""


class LinearForm:
    """Exact linear form over the root data (a, b, c, d)."""

    __slots__ = ("w",)

    def __init__(self, w):
        self.w = tuple(as_exact(x) for x in w)

    @staticmethod
    def basis(i: int) -> "LinearForm":
        return LinearForm(tuple(1 if j == i else 0 for j in range(4)))

    def __add__(self, other):
        if isinstance(other, LinearForm):
            return LinearForm(tuple(a + b for a, b in zip(self.w, other.w)))
        if other == 0:
            return self
        return NotImplemented

    __radd__ = __add__

    def __mul__(self, s):
        if isinstance(s, LinearForm):
            return NotImplemented
        return LinearForm(tuple(a * as_exact(s) for a in self.w))

    __rmul__ = __mul__

    def __truediv__(self, s):
        return LinearForm(tuple(a / as_exact(s) for a in self.w))

    def __sub__(self, other):
        return self + (other * -1)

    def dot(self, root) -> Scalar:
        out = None
        for wi, ri in zip(self.w, root):
            term = ri * wi if isinstance(wi, QuadSurd) else wi * ri
            out = term if out is None else out + term
        return out

    def __eq__(self, other):
        return isinstance(other, LinearForm) and self.w == other.w

    def __repr__(self):
        return f"LinearForm{self.w}"


ROOT_WEIGHTS = tuple(LinearForm.basis(i) for i in range(4))


@dataclass(frozen=True)
class TrackedTriple:
    """A concrete set member: sorted triple plus optional root weights."""

    triple: Triple
    weights: Optional[tuple] = None  # (wx, wy, wz, wd) LinearForms over the root

    @property
    def middle(self) -> Scalar:
        return self.triple.b


@dataclass
class NecklaceFamily:
    """Infinite tail of one subdivision row, realized from ``n_start`` on."""

    parent: Triple
    family_id: int
    form: FamilyForm            # value quadratics over the parent
    n_start: int = 1
    weight_form: Optional[FamilyForm] = None  # same row over the parent weights
    parent_weights: Optional[tuple] = None

    def member(self, n: int) -> TrackedTriple:
        x, y, z, dp = self.form.member(n)
        w = None
        if self.weight_form is not None:
            w = self.weight_form.member(n)
        return TrackedTriple(Triple(x, y, z, dp), w)

    def middle_at(self, n: int) -> Scalar:
        return quad_eval(self.form.y, n)

    def split_index(self, kappa: Scalar, hard_cap: int = 10 ** 7) -> int:
        """Smallest n >= n_start with middle(n) >= kappa (ties retained)."""
        n = self.n_start
        while self.middle_at(n) < kappa:
            n += 1
            if n - self.n_start > hard_cap:
                raise BudgetExceeded("family realization exceeded hard cap")
        return n


@dataclass
class TripleSet:
    """State of S^level(kappa; tau(root)): concrete members plus family tails."""

    concrete: list
    families: list
    kappa: Optional[Scalar]
    level: int
    geometry: str = "bm"
    root: Optional[Triple] = None

    def size(self) -> int:
        return len(self.concrete) + len(self.families)

    def min_middle(self) -> Scalar:
        cands = [tt.middle for tt in self.concrete]
        cands += [f.middle_at(f.n_start) for f in self.families]
        return min(cands, key=float)

    def iter_members(self, realize_to: int = 3) -> Iterable[TrackedTriple]:
        """Concrete members plus the first few realized members of each tail."""
        yield from self.concrete
        for f in self.families:
            for n in range(f.n_start, f.n_start + realize_to):
                yield f.member(n)


def _subdivide(tt: TrackedTriple, geometry: str):
    """Children of one member: (central TrackedTriples, NecklaceFamilies)."""
    t = tt.triple
    if geometry == "bm":
        s8 = sqrt8_like(t.d)
        cen = bm_central(t.a, t.b, t.c, t.d, s8)
        fams = bm_families(t.a, t.b, t.c, t.d, s8)
    elif geometry == "ap":
        cen = ()
        fams = ap_families(t.a, t.b, t.c, t.d)
    else:
        raise ValueError(f"unknown geometry {geometry!r}")

    wcen = wfams = None
    if tt.weights is not None:
        wa, wb, wc, wd = tt.weights
        if geometry == "bm":
            wcen = bm_central(wa, wb, wc, wd, SQRT8_EXACT)
            wfams = bm_families(wa, wb, wc, wd, SQRT8_EXACT)
        else:
            wcen = ()
            wfams = ap_families(wa, wb, wc, wd)

    concrete = []
    for i, (x, y, z, dp) in enumerate(cen):
        w = wcen[i] if wcen is not None else None
        concrete.append(TrackedTriple(Triple(x, y, z, dp), w))
    families = []
    for i, fam in enumerate(fams):
        families.append(NecklaceFamily(
            parent=t, family_id=fam.row, form=fam,
            weight_form=None if wfams is None else wfams[i],
            parent_weights=tt.weights))
    return concrete, families


def tau(t: Triple, geometry: str = "bm", track_weights: bool = True) -> TripleSet:
    """One subdivision of T: 4 concrete central triples + 18 family tails."""
    tt = TrackedTriple(t, ROOT_WEIGHTS if track_weights else None)
    concrete, families = _subdivide(tt, geometry)
    return TripleSet(concrete, families, kappa=None, level=0,
                     geometry=geometry, root=t)


def s_step(kappa: Scalar, s: TripleSet, max_size: int = 200_000) -> TripleSet:
    """One cutoff-expansion step: members with middle < kappa are subdivided."""
    if float(kappa) <= 0:
        raise ValueError("kappa must be positive")
    out_conc: list = []
    out_fams: list = []

    def expand(tt: TrackedTriple):
        conc, fams = _subdivide(tt, s.geometry)
        out_conc.extend(conc)
        out_fams.extend(fams)

    for tt in s.concrete:
        if tt.middle < kappa:
            expand(tt)
        else:
            out_conc.append(tt)
        if len(out_conc) + len(out_fams) > max_size:
            raise BudgetExceeded(f"set size exceeded {max_size}")
    for fam in s.families:
        n0 = fam.split_index(kappa)
        for n in range(fam.n_start, n0):
            expand(fam.member(n))
            if len(out_conc) + len(out_fams) > max_size:
                raise BudgetExceeded(f"set size exceeded {max_size}")
        out_fams.append(NecklaceFamily(fam.parent, fam.family_id, fam.form, n0,
                                       fam.weight_form, fam.parent_weights))
    return TripleSet(out_conc, out_fams, kappa, s.level + 1, s.geometry, s.root)


def s_iterate(kappa: Scalar, t: Triple, m: Optional[int] = None,
              geometry: str = "bm", max_size: int = 200_000,
              max_steps: int = 64, track_weights: bool = True) -> TripleSet:
    """S^m(kappa; tau(t)); with m None, iterate to the fixpoint."""
    s = tau(t, geometry, track_weights)
    s.kappa = kappa
    steps = m if m is not None else max_steps
    for _ in range(steps):
        nxt = s_step(kappa, s, max_size)
        stationary = (len(nxt.concrete) == len(s.concrete)
                      and len(nxt.families) == len(s.families)
                      and all(a.n_start == b.n_start
                              for a, b in zip(nxt.families, s.families)))
        if stationary:
            s.kappa = kappa
            s.level = m if m is not None else s.level
            return s
        s = nxt
    if m is None:
        raise BudgetExceeded(f"no fixpoint within {max_steps} steps")
    return s


# ---------------------------------------------------------------------------
# disk cache: versioned binary format + diagnostic CSV
# ---------------------------------------------------------------------------

_MAGIC = b"PKDTS1"
_PACKING_ID = {"bm": 0, "ap": 1}
_PACKING_NAME = {v: k for k, v in _PACKING_ID.items()}


def _pack_quadsurd(x: QuadSurd) -> bytes:
    return struct.pack("<qqqq", x.p.numerator, x.p.denominator,
                       x.q.numerator, x.q.denominator)


def _unpack_quadsurd(buf, off):
    pn, pd, qn, qd = struct.unpack_from("<qqqq", buf, off)
    return QuadSurd(Fraction(pn, pd), Fraction(qn, qd)), off + 32


def _pack_form(lf: LinearForm) -> bytes:
    return b"".join(_pack_quadsurd(w) for w in lf.w)


def _unpack_form(buf, off):
    ws = []
    for _ in range(4):
        w, off = _unpack_quadsurd(buf, off)
        ws.append(w)
    return LinearForm(ws), off


def save_tripleset(s: TripleSet, path: str, kappa_label: str = "") -> None:
    """Write the set as weight 4-tuples over the root (a,b,c,d)."""
    if any(tt.weights is None for tt in s.concrete):
        raise ValueError("cache format needs weight tracking enabled")
    buf = io.BytesIO()
    label = (kappa_label or (str(s.kappa) if s.kappa is not None else "")).encode()
    buf.write(_MAGIC)
    buf.write(struct.pack("<HBi", 1, _PACKING_ID[s.geometry], s.level))
    buf.write(struct.pack("<I", len(label)))
    buf.write(label)
    buf.write(struct.pack("<II", len(s.concrete), len(s.families)))
    for tt in s.concrete:
        for lf in tt.weights:
            buf.write(_pack_form(lf))
    for fam in s.families:
        buf.write(struct.pack("<BI", fam.family_id, fam.n_start))
        for lf in fam.parent_weights:
            buf.write(_pack_form(lf))
    with open(path, "wb") as fh:
        fh.write(buf.getvalue())


def load_tripleset(path: str, root: Triple, kappa: Optional[Scalar] = None) -> TripleSet:
    """Rebuild a cached set against the given root triple."""
    buf = open(path, "rb").read()
    if buf[:6] != _MAGIC:
        raise ValueError("not a triple-set cache file")
    ver, pk, level = struct.unpack_from("<HBi", buf, 6)
    if ver != 1:
        raise ValueError(f"unsupported cache version {ver}")
    off = 6 + struct.calcsize("<HBi")
    (llen,) = struct.unpack_from("<I", buf, off)
    off += 4 + llen
    nc, nf = struct.unpack_from("<II", buf, off)
    off += 8
    geometry = _PACKING_NAME[pk]
    rootvals = (root.a, root.b, root.c, root.d)
    concrete = []
    for _ in range(nc):
        ws = []
        for _ in range(4):
            lf, off = _unpack_form(buf, off)
            ws.append(lf)
        vals = [lf.dot(rootvals) for lf in ws]
        concrete.append(TrackedTriple(Triple(*vals[:3], vals[3]), tuple(ws)))
    families = []
    for _ in range(nf):
        fid, n_start = struct.unpack_from("<BI", buf, off)
        off += struct.calcsize("<BI")
        ws = []
        for _ in range(4):
            lf, off = _unpack_form(buf, off)
            ws.append(lf)
        vals = [lf.dot(rootvals) for lf in ws]
        parent = Triple(*vals[:3], vals[3])
        if geometry == "bm":
            forms = bm_families(parent.a, parent.b, parent.c, parent.d,
                                sqrt8_like(parent.d))
            wforms = bm_families(*ws, SQRT8_EXACT)
        else:
            forms = ap_families(parent.a, parent.b, parent.c, parent.d)
            wforms = ap_families(*ws)
        form = next(f for f in forms if f.row == fid)
        wform = next(f for f in wforms if f.row == fid)
        families.append(NecklaceFamily(parent, fid, form, n_start, wform, tuple(ws)))
    return TripleSet(concrete, families, kappa, level, geometry, root)


def dump_csv(s: TripleSet, path: str) -> None:
    """Diagnostic dump: concrete members and family tails as floats."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["kind", "family_id", "n_start", "x", "y", "z", "d"])
        for tt in s.concrete:
            t = tt.triple
            w.writerow(["concrete", "", "", float(t.a), float(t.b), float(t.c), float(t.d)])
        for fam in s.families:
            t = fam.member(fam.n_start).triple
            w.writerow(["family", fam.family_id, fam.n_start,
                        float(t.a), float(t.b), float(t.c), float(t.d)])
