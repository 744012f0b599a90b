import math
import random

import pytest

from packdim.necklace import Triple
from packdim.scalars import QuadSurd
from packdim.series import SeriesParams, eval_series
from packdim.solver import beta_cutoff, beta_floor
from packdim.tripleset import (BudgetExceeded, TripleSet, dump_csv,
                               load_tripleset, s_iterate, s_step,
                               save_tripleset, tau)


def test_tau_structure(unit_root):
    s = tau(unit_root)
    assert len(s.concrete) == 4
    assert len(s.families) == 18
    # first central child of T(0,1,1)
    t0 = s.concrete[0].triple
    assert (t0.a, t0.b, t0.c) == (QuadSurd(0), QuadSurd(3, 2), QuadSurd(3, 2))
    assert s.min_middle() == QuadSurd(3, 2)


def test_tau_min_middle_exceeds_5b():
    rng = random.Random(9)
    for _ in range(1000):
        a = rng.randint(0, 6)
        b = rng.randint(max(a, 1), 12)
        c = rng.randint(b, 20)
        s = tau(Triple(float(a), float(b), float(c)), track_weights=False)
        assert float(s.min_middle()) > 5 * b


def test_s_step_fixpoint_below_5b(unit_root):
    s = tau(unit_root)
    s2 = s_step(5, s)
    assert len(s2.concrete) == len(s.concrete)
    assert len(s2.families) == len(s.families)
    assert all(f.n_start == 1 for f in s2.families)


def test_s_step_is_idempotent_once_stationary(unit_root):
    s1 = s_iterate(16, unit_root, m=1)
    s2 = s_step(16, s1)
    assert len(s2.concrete) == len(s1.concrete)
    assert len(s2.families) == len(s1.families)


def test_s_iterate_kappa_one_returns_tau(unit_root):
    for m in (1, 2, 3):
        s = s_iterate(1.0 + 1e-12, unit_root, m=m, track_weights=False)
        assert len(s.concrete) == 4
        assert len(s.families) == 18


def test_s_iterate_kappa16_expands_strictly(unit_root):
    s0 = tau(unit_root)
    s1 = s_iterate(16, unit_root, m=1)
    assert len(s1.concrete) > len(s0.concrete)
    assert len(s1.families) > len(s0.families)
    # every retained member has middle >= kappa at the fixpoint
    s_fix = s_iterate(16, unit_root, m=None)
    assert float(s_fix.min_middle()) >= 16


def test_stabilization_at_beta_cutoffs(unit_root):
    # kappa = floor(beta_m): fixpoint within m steps, min middle >= kappa
    for m in range(0, 4):
        kap = beta_floor(m)
        s_m = s_iterate(kap, unit_root, m=m, track_weights=False)
        s_next = s_step(kap, s_m)
        assert len(s_next.concrete) == len(s_m.concrete)
        assert len(s_next.families) == len(s_m.families)
        assert float(s_m.min_middle()) >= kap


def test_min_middle_at_exact_beta_power(unit_root):
    # ties (middle == kappa) are retained, so kappa = beta_0 leaves tau alone
    s = s_iterate(beta_cutoff(0), unit_root, m=5)
    assert len(s.concrete) == 4
    assert s.min_middle() == beta_cutoff(0)


def test_budget_exceeded(unit_root):
    with pytest.raises(BudgetExceeded):
        s_iterate(10_000, unit_root, m=4, max_size=50)


def test_weights_express_members_over_root(unit_root):
    s = s_iterate(16, unit_root, m=1)
    root_vals = (unit_root.a, unit_root.b, unit_root.c, unit_root.d)
    for tt in s.concrete[:24]:
        wx, wy, wz, wd = tt.weights
        assert wx.dot(root_vals) == tt.triple.a
        assert wy.dot(root_vals) == tt.triple.b
        assert wz.dot(root_vals) == tt.triple.c
        assert wd.dot(root_vals) == tt.triple.d
        # positive weights: every curvature is a positive combination
        assert all(w.sign() >= 0 for w in wy.w)


def test_cache_roundtrip(tmp_path, unit_root):
    s = s_iterate(33, unit_root, m=1)
    path = tmp_path / "set.bin"
    save_tripleset(s, str(path), kappa_label="33")
    s2 = load_tripleset(str(path), unit_root, kappa=33)
    assert len(s2.concrete) == len(s.concrete)
    assert len(s2.families) == len(s.families)
    for a, b in zip(s.concrete, s2.concrete):
        assert a.triple.a == b.triple.a
        assert a.triple.d == b.triple.d
    for fa, fb in zip(s.families, s2.families):
        assert fa.family_id == fb.family_id
        assert fa.n_start == fb.n_start
        assert fa.member(fa.n_start).triple.b == fb.member(fb.n_start).triple.b
    # identical series values through the reloaded set
    params = SeriesParams()
    for kind in ("f", "gt"):
        assert eval_series(s2, kind, params, 1.36) == pytest.approx(
            eval_series(s, kind, params, 1.36), abs=1e-14)


def test_csv_dump(tmp_path, unit_root):
    s = tau(unit_root)
    path = tmp_path / "set.csv"
    dump_csv(s, str(path))
    lines = path.read_text().strip().splitlines()
    assert lines[0].startswith("kind,")
    assert len(lines) == 1 + 4 + 18


def test_apollonian_tau(unit_root):
    from packdim.apollonian import ap_tau
    s = ap_tau(unit_root)
    assert len(s.concrete) == 0
    assert len(s.families) == 2
    realized = [tuple(float(v) for v in f.member(n).triple)
                for f in s.families for n in (1, 2)]
    assert (0.0, 1.0, 4.0) in realized
    assert (1.0, 1.0, 4.0) in realized
    assert (0.0, 4.0, 9.0) in realized
    assert (1.0, 4.0, 9.0) in realized
