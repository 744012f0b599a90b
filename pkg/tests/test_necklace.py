import math
import random
from fractions import Fraction

import pytest

from packdim.necklace import (SQRT8_EXACT, Triple, ap_chain, ap_families,
                              bm_central, bm_families, child_curvatures,
                              necklace_center, necklace_sides, quad_eval)
from packdim.scalars import QuadSurd


def random_exact_triple(rng) -> Triple | None:
    a = QuadSurd(rng.randint(0, 5), rng.randint(0, 3))
    b = a + QuadSurd(rng.randint(1, 6), rng.randint(0, 3))
    c = b + QuadSurd(rng.randint(0, 6), rng.randint(0, 3))
    d = (a * b + a * c + b * c).sqrt_exact()
    if d is None:
        return None
    return Triple(a, b, c, d)


def test_triple_validation():
    with pytest.raises(ValueError):
        Triple(1, 0, 2)      # unsorted
    with pytest.raises(ValueError):
        Triple(0, 0, 1)      # b must be positive
    t = Triple(0, 1, 1)
    assert float(t.d) == pytest.approx(1.0)


def test_child_curvatures_examples(strip_root, unit_root):
    a1, b1, c1 = child_curvatures(strip_root)
    assert float(c1) == pytest.approx(8.0)
    a1, b1, c1 = child_curvatures(unit_root)
    assert c1 == QuadSurd(3, 2)
    assert b1 == QuadSurd(3, 2)
    assert a1 == QuadSurd(4, 2)
    assert float(c1) <= float(b1) <= float(a1)


def test_child_curvatures_homogeneous(unit_root):
    t7 = unit_root.scaled(QuadSurd(7))
    for x, y in zip(child_curvatures(t7), child_curvatures(unit_root)):
        assert x == y * QuadSurd(7)


def test_necklace_center_examples(strip_root, unit_root):
    assert [float(necklace_center(strip_root, n)) for n in (1, 2, 3)] == [8, 18, 32]
    for n in range(1, 6):
        assert necklace_center(unit_root, n) == QuadSurd(1 + 2 * n * n, 2 * n)
    assert necklace_center(strip_root, 0) == strip_root.c


def test_necklace_sides_examples(strip_root):
    c_nl, c_nr = necklace_sides(strip_root, 1)
    assert float(c_nl) == pytest.approx(25.0)
    assert float(c_nr) == pytest.approx(26.0)
    # ordering c_{n+1} <= c_nl <= c_nr for 20 gaps
    for n in range(1, 21):
        nl, nr = necklace_sides(strip_root, n)
        assert float(necklace_center(strip_root, n + 1)) <= float(nl) <= float(nr)


def test_necklace_sides_symmetric_when_a_equals_b():
    t = Triple(1, 1, 3)
    for n in (1, 2, 5):
        nl, nr = necklace_sides(t, n)
        assert float(nl) == pytest.approx(float(nr))


def test_sides_consistent_with_quadruple_solver(strip_root):
    # the right tail disk is the larger root of the quadruple equation on
    # its realized tangency quadruple (separation-3 partner first)
    from packdim.lorentz import J_BM, solve_fourth
    c1 = necklace_center(strip_root, 1)
    # c_{1,r} is tangent to B and C1 at separation 3 from A; the smaller
    # root of the same quadruple is the 0-th right tail
    small, big = solve_fourth((None, strip_root.a, c1, strip_root.b), 0, J_BM)
    assert float(big) == pytest.approx(26.0)
    assert float(small) == pytest.approx(10.0)


def test_family_dprime_is_exact():
    rng = random.Random(23)
    done = 0
    while done < 40:
        t = random_exact_triple(rng)
        if t is None:
            continue
        done += 1
        a, b, c, d = t.a, t.b, t.c, t.d
        for x, y, z, dp in bm_central(a, b, c, d, SQRT8_EXACT):
            assert dp * dp == x * y + x * z + y * z
        for fam in bm_families(a, b, c, d, SQRT8_EXACT):
            for n in (1, 2, 5):
                x, y, z, dp = fam.member(n)
                assert dp * dp == x * y + x * z + y * z
                assert x <= y <= z
        for fam in ap_families(a, b, c, d):
            for n in (1, 2, 5):
                x, y, z, dp = fam.member(n)
                assert dp * dp == x * y + x * z + y * z
                assert x <= y <= z


def test_families_are_homogeneous():
    t = Triple(QuadSurd(0), QuadSurd(1), QuadSurd(1), QuadSurd(1))
    for alpha in (2, 3, 10):
        ta = t.scaled(QuadSurd(alpha))
        base = bm_families(QuadSurd(0), QuadSurd(1), QuadSurd(1), QuadSurd(1), SQRT8_EXACT)
        scaled = bm_families(ta.a, ta.b, ta.c, ta.d, SQRT8_EXACT)
        for fb, fs in zip(base, scaled):
            for n in (1, 3):
                mb = fb.member(n)
                ms = fs.member(n)
                for vb, vs in zip(mb, ms):
                    assert vs == vb * QuadSurd(alpha)


def test_middle_strictly_increasing_in_n(unit_root):
    fams = bm_families(unit_root.a, unit_root.b, unit_root.c, unit_root.d, SQRT8_EXACT)
    for fam in fams:
        prev = None
        for n in range(1, 8):
            y = float(quad_eval(fam.y, n))
            if prev is not None:
                assert y > prev
            prev = y


def test_ap_chain_examples():
    t = Triple(0, 1, 1)
    assert [float(ap_chain(t, n)) for n in (1, 2, 3, 4)] == [4, 9, 16, 25]
    t111 = Triple(1, 1, 1)
    for n in (1, 2, 3):
        assert float(ap_chain(t111, n)) == pytest.approx(1 + 2 * n * n + 2 * math.sqrt(3) * n)
    # homogeneity
    t5 = t.scaled(5)
    assert float(ap_chain(t5, 3)) == pytest.approx(5 * float(ap_chain(t, 3)))


def test_ap_chain_satisfies_descartes():
    from packdim.lorentz import J_APOLLONIAN, quadruple_form
    rng = random.Random(5)
    for _ in range(50):
        a = rng.randint(0, 4)
        b = rng.randint(max(a, 1), 8)
        c = rng.randint(b, 12)
        t = Triple(float(a), float(b), float(c))
        for n in range(1, 8):
            k = (float(t.a), float(t.b), float(ap_chain(t, n - 1)), float(ap_chain(t, n)))
            assert abs(quadruple_form(k, J_APOLLONIAN)) < 1e-7
