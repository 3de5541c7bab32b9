from fractions import Fraction

import gmpy2 as g
import pytest

from cases import C_SEQUENCE_28, POWER_TRIPLES, agrees
from peckseq import (
    PeckRun,
    RealCtx,
    TargetPair,
    constants,
    search,
    digit_count,
    ellipse_points,
    generate,
    littlewood_row,
    mod1_exact,
    normalize,
    phi,
    power_record,
    psi_table,
    rational_case,
    rational_case_for_pair,
)
from peckseq.engine import _cr_mul, _cr_scale_int
from peckseq.errors import DenominatorBoundError, InputValidationError
from peckseq.realctx import certify, cubic_root_raw, eval_element, nearest_integer, wctx


# --- generation -----------------------------------------------------------------


def test_c_sequence_and_triples(runs, ctx):
    run = runs["cbrt2"]
    recs = list(generate(run.lam, 1, 28, ctx))
    assert [int(r.c) for r in recs] == C_SEQUENCE_28
    for rec, (a, b, c) in zip(recs, POWER_TRIPLES):
        assert (int(rec.a), int(rec.b), int(rec.c)) == (a, b, c)
    assert (int(recs[1].a), int(recs[1].b), int(recs[1].c)) == (5, 4, 3)


def test_generate_requires_positive_start(runs, ctx):
    with pytest.raises(InputValidationError):
        next(generate(runs["cbrt2"].lam, 0, 3, ctx))


def test_stream_matches_repeated_squaring(runs, ctx):
    run = runs["inverse-7"]
    recs = {r.n: r for r in generate(run.lam, 1, 24, ctx)}
    for n in (1, 7, 13, 24):
        iso = power_record(run.lam, n, ctx)
        assert (iso.a, iso.b, iso.c) == (recs[n].a, recs[n].b, recs[n].c)


def test_denominator_law(runs, ctx):
    for name in ("inverse-7", "tribonacci-inverse", "shifted-square"):
        run = runs[name]
        d = run.pair.cp.d
        for rec in generate(run.lam, 1, 30, ctx):
            for coord in (rec.a, rec.b, rec.c):
                assert (coord * d).denominator == 1


def test_invalid_d_override_raises(ctx):
    # d=3 admits the unit's own coordinates, but its square needs ninths:
    # the runtime integrality guard must catch the bad override
    pair = TargetPair.from_cubic(1, -1, -1, -1, beta=(-1, -1, 1, 1), d=3)
    lam = normalize(pair.cp.element(g.mpq(1, 3), g.mpq(1, 3), 0), ctx)
    with pytest.raises(DenominatorBoundError):
        list(generate(lam, 1, 10, ctx))


def test_xyz_difference_identity(runs, ctx):
    # X_n = Y_n - Z_n
    for rec in generate(runs["cbrt2"].lam, 1, 12, ctx, with_xyz=True):
        with wctx(256):
            gap = abs(rec.X.value - (rec.Y.value - rec.Z.value))
            assert gap <= rec.X.radius + rec.Y.radius + rec.Z.radius + g.mpfr(
                "1e-40"
            )


# --- rotation angle -------------------------------------------------------------


def test_phi_values(runs):
    checks = {
        "cbrt2": "0.5899",
        "miracle": "-0.196350",
        "tribonacci-inverse": "-0.965359",
    }
    for name, want in checks.items():
        got = float(runs[name].consts.phi.value)
        assert agrees(got, want, 6), (name, got, want)


def test_phi_over_pi_miracle(runs):
    with wctx(128):
        got = float(runs["miracle"].consts.phi.value / g.const_pi())
    assert agrees(got, "-0.062499998136", 11)


# --- constants -------------------------------------------------------------------


def test_constants_published_triplet(runs):
    bundles = {
        "cbrt2": {
            "C1": "1.41421", "C2": "0.458243", "M_theta": "1.09112",
            "M_beta2": "0.989540", "N_tilde": "8.729", "C0": "1.07971",
            "n0": "3.216",
        },
        "plastic": {
            "C1": "1.66593", "C2": "0.484238", "M_theta": "1.29181",
            "C0": "2.6213", "n0": "16.6109",
        },
        "squares-147-740": {"C0": "22.3329", "n0": "1.0"},
    }
    for name, wants in bundles.items():
        cd = runs[name].consts.as_dict()
        for key, want in wants.items():
            assert agrees(float(cd[key].value), want, 6), (name, key)


def test_constants_certified_radius(runs):
    for name in ("cbrt2", "inverse-7"):
        for key, v in runs[name].consts.as_dict().items():
            assert float(v.radius) < abs(float(v.value)) * 1e-6 + 1e-30


# --- littlewood rows ---------------------------------------------------------------


def test_littlewood_row_published(runs, ctx):
    pair = runs["cbrt2"].pair
    a, b = pair.alpha_source(), pair.beta_source()
    row = littlewood_row(177, a, b, ctx)
    assert agrees(float(row.product.value), "0.03201189", 7)
    row = littlewood_row(483870160, a, b, ctx)
    assert agrees(float(row.product.value), "0.00265565", 7)


def test_littlewood_row_m_one(runs, ctx):
    pair = runs["cbrt2"].pair
    a, b = pair.alpha_source(), pair.beta_source()
    row = littlewood_row(1, a, b, ctx)
    want = abs(float(row.frac_alpha.value)) * abs(float(row.frac_beta.value))
    assert abs(float(row.product.value) - want) < 1e-15
    with pytest.raises(InputValidationError):
        littlewood_row(0, a, b, ctx)


def test_cr_helpers_enclose():
    x = certify(lambda p: g.sqrt(g.mpfr(2)), RealCtx(128))
    y = certify(lambda p: g.const_pi(), RealCtx(128))
    prod = _cr_mul(x, y)
    with wctx(300):
        want = g.sqrt(g.mpfr(2)) * g.const_pi()
        assert abs(prod.value - want) <= prod.radius
    s = _cr_scale_int(x, 10**30)
    with wctx(300):
        want = g.sqrt(g.mpfr(2)) * 10**30
        assert abs(s.value - want) <= s.radius + g.mpfr("1e-5")


# --- psi table ---------------------------------------------------------------------


def test_psi_table_exact_values(runs, ctx):
    run = runs["plastic"]
    cf = run.convergents(10_000)
    cert = psi_table(run.pair, run.lam, cf, ctx, consts=run.consts, max_q=200)
    rows = {r.q: r for r in cert.rows}
    assert str(rows[58].psi) == "2839729"
    assert str(rows[183].psi) == "5232446865180756766896"
    assert rows[183].checked  # 183 > n0 = 16.6
    assert rows[4].checked is False  # 4 < n0
    assert cert.all_satisfied()


def test_psi_table_row_limit(runs, ctx):
    run = runs["cbrt2"]
    cf = run.convergents(10_000)
    cert = psi_table(
        run.pair, run.lam, cf, ctx, consts=run.consts, max_q=None, rows=2
    )
    assert [r.q for r in cert.rows] == [5, 16]


def test_psi_table_digit_budget_path(runs, ctx):
    run = runs["cbrt2"]
    cf = run.convergents(10_000)
    cert = psi_table(
        run.pair, run.lam, cf, ctx, consts=run.consts, max_q=10_000,
        digit_budget=100,
    )
    rows = {r.q: r for r in cert.rows}
    assert rows[16].psi is not None  # 9 digits, under budget
    assert rows[229].psi is None and rows[229].psi_digits == 134
    assert rows[8260].psi is None and rows[8260].psi_digits == 4833
    assert rows[8489].psi is None and rows[8489].psi_digits == 4967


def test_psi_table_deep_rows_plastic(runs, ctx):
    # published rows past desk scale; products at ~10k-digit multipliers
    run = runs["plastic"]
    cf = run.convergents(100_000)
    cert = psi_table(
        run.pair, run.lam, cf, ctx, consts=run.consts, max_q=100_000
    )
    rows = {r.q: r for r in cert.rows}
    assert rows[70959].psi_digits == 8666
    assert agrees(float(rows[70959].product.value), "0.0000162888", 6)
    # the published bound here is truncated, not rounded: compare at 4
    assert agrees(float(rows[70959].bound.value), "0.000032599", 4)
    assert rows[80408].psi_digits == 9820
    assert agrees(float(rows[80408].product.value), "4.58789e-9", 6)
    assert agrees(float(rows[80408].bound.value), "9.18080e-9", 6)
    assert cert.all_satisfied()


def test_psi_table_beyond_desk_scale(runs, ctx):
    # rows whose psi exceeds the digit budget report exact digit counts
    # through the rigorous size enclosure, never materializing the integer
    run = runs["cbrt2"]
    cf = run.convergents(1_500_000)
    cert = psi_table(
        run.pair, run.lam, cf, ctx, consts=run.consts, max_q=1_500_000
    )
    rows = {r.q: r for r in cert.rows}
    for q, digits, bound in (
        (16749, 9801, "0.0000427811"),
        (25238, 14768, "3.13102e-6"),
        (344843, 201788, "1.01882e-6"),
        (1059767, 620132, "7.6869e-7"),
        (1404610, 821919, "6.02682e-8"),
    ):
        assert rows[q].psi_digits == digits, q
        assert agrees(float(rows[q].bound.value), bound, 6), q
    assert rows[344843].psi is None  # above the 50k-digit budget
    assert rows[25238].psi is not None


def test_pipeline_sweep_fresh_fields(ctx):
    # assorted cubics outside the golden set, discriminant-default d,
    # arbitrary beta coordinates: every certified bound must hold
    sweep = [
        (2, 3, (1, -2, 1, 2)),
        (-3, 1, (0, 1, 1, 1)),
        (-3, -2, (2, 0, 3, 3)),
        (5, 7, (-1, 2, 1, 1)),
        (0, -14, (0, 0, 1, 1)),
        (-7, -1, (1, 1, 2, 2)),
    ]
    for p, q, beta in sweep:
        pair = TargetPair.from_pq(p, q, beta=beta)
        lam = search(pair.cp, ctx, 3000, 3)
        run_ = PeckRun(pair, lam, ctx)
        cert = run_.certificate(max_q=500)
        assert cert.rows, (p, q)
        assert cert.all_satisfied(), (p, q)


def test_fresh_field_end_to_end(ctx):
    # a cubic outside the golden set, with the discriminant-default d
    pair = TargetPair.from_pq(3, 5)
    assert pair.cp.d == abs(4 * 27 - 27 * 25)
    assert pair.cp.d_source == "discriminant_default"
    lam = search(pair.cp, ctx, 2000, 3)
    assert abs(lam.element.norm()) == 1
    run_ = PeckRun(pair, lam, ctx)
    cert = run_.certificate(max_q=500)
    assert cert.rows and cert.all_satisfied()


def test_digit_count_exact():
    assert digit_count(1) == 1
    assert digit_count(999) == 3
    assert digit_count(1000) == 4
    assert digit_count(10**133 * 7) == 134
    with pytest.raises(InputValidationError):
        digit_count(0)


# --- the nearest-integer identities for k_n theta and k_n theta^2 ---------------------


def _threshold_n(lam_value: float, rhs: float) -> int:
    # first n with lam^(n/2) > rhs
    import math

    if rhs <= 1:
        return 1
    return int(math.ceil(2 * math.log(rhs) / math.log(lam_value))) + 1


def test_nearest_integer_identities(runs, ctx):
    for name in ("cbrt2", "miracle", "shifted-square"):
        run = runs[name]
        cp = run.pair.cp
        p, q, d = cp.p, cp.q, cp.d
        with wctx(128):
            th = cubic_root_raw(p, q, 128)
            sq2 = g.sqrt(g.mpfr(2))
            c1 = max(sq2, sq2 * abs(th) / g.sqrt(3 * th * th - 4 * p))
            lam_v = float(run.lam.real_value.value)
            thr_a = _threshold_n(lam_v, float(2 * sq2 * d * c1 / abs(th)))
            thr_b = _threshold_n(lam_v, float(2 * d * c1))
        for rec in generate(run.lam, 1, 30, ctx):
            k, b, c, a = rec.k, rec.b, rec.c, rec.a
            if k <= 0:
                continue
            bits = int(k.bit_length())
            prec = 2 * bits + 192
            if rec.n > thr_a:
                # <k theta> = -d Z_n/theta, i.e. <k theta> + d(b - c theta) == 0
                n1 = nearest_integer(
                    certify(lambda pr: k * cubic_root_raw(p, q, pr), ctx, prec=prec)
                )
                delta = certify(
                    lambda pr: (k * cubic_root_raw(p, q, pr) - n1)
                    + d * (g.mpq(b) - g.mpq(c) * g.mpq(cubic_root_raw(p, q, pr))),
                    ctx,
                    prec=prec,
                )
                assert abs(delta.value) <= delta.radius + g.mpfr("1e-30"), (name, rec.n)
            if rec.n > thr_b:
                n2 = nearest_integer(
                    certify(
                        lambda pr: k * cubic_root_raw(p, q, pr) ** 2, ctx, prec=prec
                    )
                )
                delta2 = certify(
                    lambda pr: (k * cubic_root_raw(p, q, pr) ** 2 - n2)
                    + d
                    * (
                        g.mpq(a)
                        + p * g.mpq(c)
                        - g.mpq(c) * g.mpq(cubic_root_raw(p, q, pr)) ** 2
                    ),
                    ctx,
                    prec=prec,
                )
                assert abs(delta2.value) <= delta2.radius + g.mpfr("1e-30"), (
                    name,
                    rec.n,
                )


# --- unit circle and rotation ---------------------------------------------------------


def test_sqrt_lambda_lambda2_on_unit_circle(runs):
    # lambda * |lambda_2|^2 = 1 (norm +1, conjugate pair)
    for name in ("cbrt2", "miracle", "inverse-7"):
        run = runs[name]
        cp = run.pair.cp
        a1, b1, c1 = run.lam.element.coords()

        def compute(pr):
            th = cubic_root_raw(cp.p, cp.q, pr)
            lam_v = eval_element(run.lam.element, pr)
            re = (2 * (g.mpq(a1) + cp.p * g.mpq(c1)) - g.mpq(b1) * g.mpq(th)
                  - g.mpq(c1) * g.mpq(th) ** 2) / 2
            im = g.sqrt(3 * th * th - 4 * cp.p) * (g.mpq(b1) - g.mpq(c1) * g.mpq(th)) / 2
            return lam_v * (g.mpfr(re) ** 2 + g.mpfr(im) ** 2)

        out = certify(compute, RealCtx(256))
        assert abs(float(out.value) - 1.0) < 1e-40


# --- ellipse ---------------------------------------------------------------------------


def test_ellipse_first_point_and_constant(runs, ctx):
    pts = list(ellipse_points(runs["cbrt2"].lam, 1, 6, ctx))
    first = pts[0]
    assert agrees(float(first.u.value), "0.2599210", 7)
    assert agrees(float(first.v.value), "-0.4125989", 7)
    with wctx(128):
        rhs = 4 / (3 * g.root(g.mpfr(4), 3))
        lhs_minus_rhs = float(first.residual.value)
        th = g.root(g.mpfr(2), 3)
        u, v = g.mpfr(first.u.value), g.mpfr(first.v.value)
        full = (th * u - 2 * v) ** 2 + 3 * th * th * u * u
        assert abs(float(full - rhs) - lhs_minus_rhs) < 1e-12


def test_ellipse_residual_bound(runs, ctx):
    for name in ("cbrt2", "inverse-7"):
        run = runs[name]
        cp = run.pair.cp
        p, d = cp.p, cp.d
        with wctx(192):
            th = cubic_root_raw(cp.p, cp.q, 192)
            sq2 = g.sqrt(g.mpfr(2))
            c1 = max(sq2, sq2 * abs(th) / g.sqrt(3 * th * th - 4 * p))
            cprime = (1 + sq2) * c1 * d / (3 * th * th - p)
            lam_v = eval_element(run.lam.element, 192)
            for pt in ellipse_points(run.lam, 1, 14, ctx):
                lam_half = g.sqrt(lam_v) ** pt.n
                if not (
                    lam_half > 2 * sq2 * d * c1 / abs(th) and lam_half > 2 * d * c1
                ):
                    continue
                bound = 4 * d * d * cprime / lam_v ** g.mpq(3 * pt.n, 2)
                assert abs(pt.residual.value) - pt.residual.radius <= bound, (
                    name,
                    pt.n,
                )


# --- degenerate pairs --------------------------------------------------------------------


def test_rational_case_both_rational():
    spec = rational_case(Fraction(1, 2), 0, 1, 3)  # alpha=1/2, beta=1/3
    assert spec.kind == "zero_products"
    assert spec.base == "index"
    assert spec.factor == 6
    # products along m_n = 6n vanish identically
    for n in (1, 2, 5):
        m = spec.factor * n
        assert mod1_exact(g.mpq(m, 2)) == 0 and mod1_exact(g.mpq(m, 3)) == 0


def test_rational_case_beta_rational():
    spec = rational_case(None, 0, 7, 3)  # beta = 7/3, alpha irrational
    assert spec.kind == "zero_products"
    assert spec.base == "alpha_convergents"
    assert spec.factor == 3
    assert spec.beta_bound == 0


def test_rational_case_dependent():
    spec = rational_case(None, -7, 0, 2)  # beta = -7 alpha / 2
    assert spec.kind == "bounded_products"
    assert spec.factor == 2
    assert spec.alpha_bound == 4
    assert spec.beta_bound == 14


def test_rational_case_for_pair(ctx):
    pair = TargetPair.from_pq(0, 2, beta=(1, 0, 0, 3), d=1)
    assert pair.beta_is_rational()
    spec = rational_case_for_pair(pair)
    assert spec.kind == "zero_products"
    generic = TargetPair.from_pq(0, 2, beta=(0, 0, 1, 1), d=1)
    with pytest.raises(InputValidationError):
        rational_case_for_pair(generic)


def test_dependent_sequence_bounds_hold():
    # beta = (r1 alpha + r2)/s along m_n = s q_n: spot-check with alpha = sqrt2
    from peckseq.contfrac import expand

    ctx = RealCtx(192)
    import gmpy2

    alpha_src = lambda prec: gmpy2.sqrt(gmpy2.mpfr(2))
    cf = expand(alpha_src, 18, ctx)
    r1, r2, s = 3, 1, 2  # beta = (3 sqrt2 + 1)/2
    spec = rational_case(None, r1, r2, s)
    with wctx(256):
        alpha = gmpy2.sqrt(gmpy2.mpfr(2))
        beta = (r1 * alpha + r2) / s
        for _, qn in cf.convergents[4:]:
            m = spec.factor * qn
            fa = abs(m * alpha - g.floor(m * alpha + g.mpq(1, 2)))
            fb = abs(m * beta - g.floor(m * beta + g.mpq(1, 2)))
            assert m * fa < spec.alpha_bound
            assert m * fb < spec.beta_bound
