import json
import math

import pytest

from packdim.series import SeriesParams
from packdim.solver import (NoBracket, Stagnation, beta_cutoff, beta_floor,
                            bounds, find_root, gap_check, parse_kappa,
                            results_json, table1, table1_csv, trunc6)
from packdim.scalars import QuadSurd


def test_beta_cutoffs():
    assert beta_cutoff(0) == QuadSurd(3, 2)
    assert [beta_floor(m) for m in range(6)] == [5, 33, 197, 1153, 6725, 39201]


def test_parse_kappa():
    assert parse_kappa("16") == 16
    assert parse_kappa("b0") == QuadSurd(3, 2)
    assert parse_kappa("b0^3") == QuadSurd(3, 2) ** 3
    from fractions import Fraction
    assert parse_kappa("5.5") == QuadSurd(Fraction(11, 2))


def test_trunc6():
    assert trunc6(1.3914059999999) == 1.391406
    assert trunc6(1.3914067) == 1.391406
    assert trunc6(1.5497029) == 1.549702


def test_find_root_synthetic():
    t, res, iters = find_root(lambda t: 2.0 ** (1.0 - t), slope_hint=-math.log(2.0))
    assert res < 1e-7
    assert abs(t - 1.0) < 3e-7
    assert trunc6(t) in (0.999999, 1.0)


def test_find_root_constant_slope_same_fixed_point():
    fn = lambda t: 2.0 ** (1.0 - t)
    t1, _, _ = find_root(fn, -math.log(2.0))
    t2, _, _ = find_root(fn, -math.log(2.0), constant_slope=True)
    assert abs(t1 - t2) < 1e-6


def test_find_root_no_bracket():
    with pytest.raises(NoBracket):
        find_root(lambda t: 2.0, slope_hint=-1.0)
    with pytest.raises(NoBracket):
        find_root(lambda t: 0.5, slope_hint=-1.0)


def test_basic_variant_reproduces_published_row0():
    r = bounds("bm", 0, beta_cutoff(0), "basic")
    assert r.lam_trunc == pytest.approx(1.238656, abs=2e-6)
    assert r.mu_trunc == pytest.approx(1.549702, abs=2e-6)
    assert r.residual_lambda < 1e-7 and r.residual_mu < 1e-7


def test_bounds_invariants_and_gap():
    r = bounds("bm", 1, 16, "improved")
    assert r.lam <= r.mu
    assert gap_check(r, beta_cutoff(1))
    assert r.mu - r.lam < 2.3 / math.log(16.0)
    with pytest.raises(ValueError):
        gap_check(r, beta_cutoff(0))  # kappa > beta_m precondition violated


def test_monotone_refinement():
    r16 = bounds("bm", 1, 16, "improved")
    r33 = bounds("bm", 1, 33, "improved")
    assert r16.lam <= r33.lam + 1e-9
    assert r33.mu <= r16.mu + 1e-9


def test_strict_separation_from_apollonian_upper():
    r = bounds("bm", 1, 16, "improved")
    assert r.lam > 1.310876


def test_kappa_must_exceed_one():
    with pytest.raises(ValueError):
        bounds("bm", 0, 1, "improved")


def test_m_zero_ignores_large_cutoff():
    # S^0 is tau regardless of kappa, so the m = 0 row reproduces at any cutoff
    r16 = bounds("bm", 0, 16, "improved")
    r0 = bounds("bm", 0, beta_cutoff(0), "improved")
    assert r16.lam == pytest.approx(r0.lam, abs=1e-7)
    assert r16.mu == pytest.approx(r0.mu, abs=1e-7)


def test_json_schema_keys():
    r = bounds("bm", 0, beta_cutoff(0), "improved")
    d = r.to_json_dict()
    assert set(d) == {"packing", "m", "kappa", "variant", "lambda", "mu",
                      "residual_lambda", "residual_mu", "gap_bound", "wall_time_s"}
    payload = json.loads(results_json([r]))
    assert payload[0]["packing"] == "bm"


def test_table_csv_layout():
    rows = ((0, "b0^1", True), (1, "16", True))
    rs = table1(rows)
    csv = table1_csv(rs)
    lines = csv.strip().splitlines()
    assert lines[0] == "m,kappa,lambda_tilde,lambda,mu,mu_tilde"
    assert len(lines) == 3
    first = lines[1].split(",")
    assert first[0] == "0"
    assert first[2] == "1.238656"   # published basic lower bound reproduces


def test_rigorous_interval_contains_fast():
    for m, kappa in ((0, beta_cutoff(0)), (1, 16)):
        fast = bounds("bm", m, kappa, "improved", mode="fast")
        rig = bounds("bm", m, kappa, "improved", mode="rigorous")
        assert rig.lam <= fast.lam + 1e-12
        assert fast.mu <= rig.mu + 1e-12
        # certified residual direction: lower endpoint is a true lower bound
        assert rig.lam <= rig.mu


def test_heuristic_containment_smallrow():
    # the heuristic exponent estimate sits inside even the coarse bounds
    r = bounds("bm", 0, beta_cutoff(0), "improved")
    assert r.lam <= 1.33544546879 <= r.mu
