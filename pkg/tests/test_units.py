import gmpy2 as g
import pytest

from cases import CASES, agrees
from peckseq import CubicParams, log_ratio, normalize, search
from peckseq.errors import InvalidUnitError, UnitNotFoundError
from peckseq.units import validate


# --- normalize -------------------------------------------------------------------


def test_normalize_cbrt2(ctx):
    cp = CubicParams.from_pq(0, 2, d=1)
    got = normalize(cp.element(-1, 1, 0), ctx)  # theta - 1
    assert got.element.coords() == (1, 1, 1)
    assert agrees(float(got.real_value.value), "3.8473", 5)


def test_normalize_miracle(ctx):
    cp = CubicParams.from_pq(8, 10, d=1)
    got = normalize(cp.element(-11, 0, 1), ctx)  # theta^2 - 11
    assert got.element.coords() == (9, 10, 3)
    assert agrees(float(got.real_value.value), "75.2262", 6)


def test_normalize_with_denominator(ctx):
    cp = CubicParams.from_pq(-6, 47, d=9)
    got = normalize(cp.element(g.mpq(-2, 3), g.mpq(1, 3), 0), ctx)
    assert got.element.coords() == (g.mpq(10, 9), g.mpq(2, 9), g.mpq(1, 9))
    assert agrees(float(got.real_value.value), "2.83118", 6)


def test_normalize_involution_class(ctx):
    cp = CubicParams.from_pq(0, 2, d=1)
    e = cp.element(-1, 1, 0)
    targets = [e, -e, e.inv(), -e.inv()]
    results = {normalize(t, ctx).element.coords() for t in targets}
    assert results == {(g.mpq(1), g.mpq(1), g.mpq(1))}


def test_normalize_rejects_non_units(ctx):
    cp = CubicParams.from_pq(0, 2, d=1)
    with pytest.raises(InvalidUnitError):
        normalize(cp.one(), ctx)  # +-1 excluded
    with pytest.raises(InvalidUnitError):
        normalize(cp.theta(), ctx)  # norm 2


def test_validate_norm_minus_one(ctx):
    # x^3 - x - 2: theta'=... element theta^2-theta-1 has norm -1? construct one:
    cp = CubicParams.from_pq(1, 2, d=1)
    lam = cp.element(1, 1, 1)
    assert lam.norm() == 1
    cand = validate(lam, ctx)
    assert cand.norm_value == 1 and float(cand.real_value.value) > 1


def test_validate_rejects_foreign_denominator(ctx):
    cp = CubicParams.from_pq(0, 2, d=1)
    with pytest.raises(InvalidUnitError):
        validate(cp.element(g.mpq(1, 2), 1, 1), ctx)


# --- search ------------------------------------------------------------------------


def test_search_cbrt2_small_window(ctx):
    cp = CubicParams.from_pq(0, 2, d=1)
    got = search(cp, ctx, 10, 3)
    assert got.element.coords() == (1, 1, 1)
    assert abs(got.element.norm()) == 1


def test_search_plastic_band(ctx):
    cp = CubicParams.from_pq(1, 1, d=1)
    got = search(cp, ctx, 10, 3)
    assert abs(got.element.norm()) == 1
    v = float(got.real_value.value)
    theta = 1.324717957244746
    assert 1 < v <= theta**4 + 1e-9
    assert got.element.coords() == (0, 1, 0)


def test_search_large_unit_with_denominator(ctx):
    cp = CubicParams.from_pq(147, 740, d=9)
    got = search(cp, ctx, 2000, 3)
    assert got.element.coords() == (
        g.mpq(96109, 9), g.mpq(25898, 9), g.mpq(1834, 9),
    )
    assert agrees(float(got.real_value.value), "91946.994", 8)


def test_search_negative_root_field(ctx):
    # q < 0 puts the real root below zero; the scan must still land a unit
    cp = CubicParams.from_pq(0, -2, d=1)
    got = search(cp, ctx, 10, 3)
    assert abs(got.element.norm()) == 1
    assert got.real_value.lo_exact() > 1
    assert got.element.coords() == (1, -1, 1)


def test_search_exhausted_raises(ctx):
    cp = CubicParams.from_pq(147, 740, d=9)
    with pytest.raises(UnitNotFoundError):
        search(cp, ctx, 5, 1)


def test_search_invariants_all_cases(ctx):
    from peckseq import TargetPair

    for case in CASES:
        pair = TargetPair.from_cubic(*case.cubic, beta=case.beta, d=case.d)
        got = search(pair.cp, ctx, 2000, 3)
        assert got.element.norm() == 1  # a unit above 1 has norm +1
        assert got.real_value.lo_exact() > 1
        for coord in got.element.coords():
            assert (coord * case.d).denominator == 1


def test_search_matches_published_units_up_to_power(ctx):
    from peckseq import TargetPair

    for case in CASES:
        pair = TargetPair.from_cubic(*case.cubic, beta=case.beta, d=case.d)
        found = search(pair.cp, ctx, 2000, 3)
        expected = normalize(
            pair.cp.element(
                g.mpq(case.lam_nums[0], case.lam_den),
                g.mpq(case.lam_nums[1], case.lam_den),
                g.mpq(case.lam_nums[2], case.lam_den),
            ),
            ctx,
        )
        ratio = float(log_ratio(found, expected, ctx).value)
        assert abs(ratio - round(ratio)) < 1e-8, case.name
