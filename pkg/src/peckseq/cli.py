"""Command-line front door.

Subcommands wire the pipeline end to end:

* construct - full run: depress, unit, rotation angle, convergents,
  constants, certified product table (human-readable report or JSON)
* table     - the certified product table as CSV
* ellipse   - renormalized remainder points and residuals as CSV
* cf        - certified continued fraction of phi/pi as CSV
* stats     - empirical counters vs closed-form estimates as CSV
* unit      - find (or validate) the unit

Exit codes: 0 success, 2 bound violation, 3 precision exhaustion,
4 input validation.
"""

from __future__ import annotations

import argparse
import json
import re
import sys

import gmpy2 as g

from . import engine, stats
from .contfrac import expand
from .engine import PeckRun, TargetPair, digit_count, rational_case_for_pair
from .errors import (
    BoundViolatedError,
    InputValidationError,
    PeckseqError,
    PrecisionError,
)
from .realctx import CertifiedReal, RealCtx, wctx
from .units import UnitCandidate, normalize, search

ABBREV_THRESHOLD = 25  # digits shown in full in the human report


# ---------------------------------------------------------------------------
# Deterministic decimal formatting (round half even at the digit count)
# ---------------------------------------------------------------------------


def fmt(x, digits: int = 6) -> str:
    v = x.value if isinstance(x, CertifiedReal) else x
    if isinstance(v, (int,)) or isinstance(v, type(g.mpz(0))):
        return str(v)
    with wctx(max(getattr(v, "precision", 64), 64)):
        v = g.mpfr(v)
        if g.is_zero(v):
            return "0"
        sign = "-" if v < 0 else ""
        ds, exp, _ = abs(v).digits(10, digits)
    if 0 < exp <= digits + 3:
        if exp >= len(ds):
            body = ds + "0" * (exp - len(ds))
        else:
            body = ds[:exp] + "." + ds[exp:]
        return sign + body
    if -4 < exp <= 0:
        return sign + "0." + "0" * (-exp) + ds
    mant = ds[0] + ("." + ds[1:] if len(ds) > 1 else "")
    return f"{sign}{mant}e{exp - 1:+03d}"


def abbreviate_int(m, max_digits: int = ABBREV_THRESHOLD) -> str:
    nd = digit_count(m)
    if nd <= max_digits:
        return str(m)
    first = str(abs(g.mpz(m)) // g.mpz(10) ** (nd - 3))
    last = str(abs(g.mpz(m)) % 1000).zfill(3)
    return f"{first}...{last} ({nd} digits)"


# ---------------------------------------------------------------------------
# Argument plumbing
# ---------------------------------------------------------------------------


def _ints(text: str, n: int, what: str) -> list[int]:
    parts = text.split(",")
    if len(parts) != n:
        raise InputValidationError(f"{what} needs {n} comma-separated integers")
    try:
        return [int(p) for p in parts]
    except ValueError as exc:
        raise InputValidationError(f"{what}: {exc}") from exc


def add_common(sp):
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--cubic", help="A,B,C,D of the source cubic")
    group.add_argument("--pq", help="p,q of a depressed cubic x^3 - p x - q")
    sp.add_argument("--beta", default="0,0,1,1", help="r0,r1,r2,s (default theta^2)")
    sp.add_argument("--d", type=int, default=None, help="denominator bound override")
    sp.add_argument("--lambda", dest="lam", default=None, help="unit a,b,c,den")
    sp.add_argument("--k-max", type=int, default=2000, help="unit scan bound")
    sp.add_argument("--window", type=int, default=3, help="unit scan window")
    sp.add_argument("--prec-bits", type=int, default=256)
    sp.add_argument("--depth", type=int, default=24, help="continued-fraction depth")
    sp.add_argument("--digit-budget", type=int, default=50_000)
    sp.add_argument("--max-q", type=int, default=10_000)
    sp.add_argument("--digits", type=int, default=6, help="display digits")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--out", default=None, help="output path (default stdout)")


def _pair_from_args(args) -> TargetPair:
    beta = tuple(_ints(args.beta, 4, "--beta"))
    if args.cubic is not None:
        a, b, c, dd = _ints(args.cubic, 4, "--cubic")
        return TargetPair.from_cubic(a, b, c, dd, beta=beta, d=args.d)
    p, q = _ints(args.pq, 2, "--pq")
    return TargetPair.from_pq(p, q, beta=beta, d=args.d)


def _lambda_from_args(args, pair: TargetPair, ctx: RealCtx) -> UnitCandidate:
    if args.lam is not None:
        a, b, c, den = _ints(args.lam, 4, "--lambda")
        if den == 0:
            raise InputValidationError("--lambda denominator must be nonzero")
        el = pair.cp.element(g.mpq(a, den), g.mpq(b, den), g.mpq(c, den))
        return normalize(el, ctx)
    return search(pair.cp, ctx, args.k_max, args.window)


def _emit(args, text: str):
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# construct
# ---------------------------------------------------------------------------


def _element_str(e, digits) -> str:
    den = int(g.gcd(g.gcd(e.x.denominator, e.y.denominator), e.z.denominator))
    lcm = den
    for v in e.coords():
        lcm = int(g.lcm(g.mpz(lcm), v.denominator))
    nums = [int(v * lcm) for v in e.coords()]
    body = f"{nums[0]} + {nums[1]}*th + {nums[2]}*th^2"
    return f"({body})/{lcm}" if lcm != 1 else body


def cmd_construct(args) -> int:
    pair = _pair_from_args(args)
    ctx = RealCtx(args.prec_bits)
    dg = args.digits
    lines = []
    cp = pair.cp
    lines.append(
        f"Step 1. depressed cubic x^3 - ({cp.p})x - ({cp.q}); "
        f"theta = {pair.fmap.mult}*alpha + ({pair.fmap.shift})"
    )
    theta = cp.real_root(ctx)
    lines.append(f"        theta = {fmt(theta, dg)}   d = {cp.d} ({cp.d_source})")

    if pair.beta_is_rational():
        spec = rational_case_for_pair(pair)
        lines.append("Case: beta is rational.")
        base = "n" if spec.base == "index" else "q_n (convergent denominators of alpha)"
        lines.append(f"  multipliers m_n = {spec.factor} * {base}")
        lines.append(
            f"  every product m_n ||m_n alpha|| ||m_n beta|| is eventually 0 "
            f"(alpha side stays below {spec.alpha_bound})"
        )
        _emit(args, "\n".join(lines) + "\n")
        return 0

    lam = _lambda_from_args(args, pair, ctx)
    lines.append(
        f"Step 2. unit lambda = {_element_str(lam.element, dg)} "
        f"= {fmt(lam.real_value, dg)}   (norm {lam.norm_value:+d})"
    )
    lines.append(f"Step 3. m_n = {pair.scale} * c_n")
    run = PeckRun(pair, lam, ctx, digit_budget=args.digit_budget)
    consts = run.consts
    with wctx(96):
        phi_pi = consts.phi.value / g.const_pi()
    lines.append(
        f"Step 4. phi = {fmt(consts.phi, dg)}   phi/pi = {fmt(phi_pi, dg)}"
    )
    cf = run.convergents(args.max_q)
    frac_list = ", ".join(
        f"{p}/{q}" for p, q in cf.noninteger_convergents()[:10]
    )
    lines.append(f"        non-integer convergents: {frac_list}")
    lines.append(
        "Step 5. "
        + "  ".join(
            f"{name} = {fmt(val, dg)}"
            for name, val in list(consts.as_dict().items())[:8]
        )
    )
    lines.append(
        f"Step 6. C0 = {fmt(consts.c0, dg)}   n0 = {fmt(consts.n0, dg)}"
    )
    psi_terms = ", ".join(
        f"m_{q}" for _, q in cf.noninteger_convergents()[:10]
    )
    lines.append(f"        psi_n = m_(Q_n): {psi_terms}, ...")
    cert = engine.psi_table(
        pair,
        lam,
        cf,
        ctx,
        consts=consts,
        max_q=args.max_q,
        digit_budget=args.digit_budget,
    )
    lines.append(
        "Result. for Q_n > n0: psi_n ||psi_n a|| ||psi_n b|| <= C0 / Q_(n+1)"
    )
    lines.append(f"{'Q_n':>10s}  {'psi_n':<32s}  {'product':<14s}  {'bound':<14s}")
    for row in cert.rows:
        psi_s = (
            abbreviate_int(row.psi)
            if row.psi is not None
            else f"({row.psi_digits} digits)"
        )
        prod_s = fmt(row.product, dg) if row.product is not None else "-"
        lines.append(
            f"{row.q:>10d}  {psi_s:<32s}  {prod_s:<14s}  {fmt(row.bound, dg):<14s}"
        )

    if args.format == "json":
        payload = {
            "cubic": {"p": cp.p, "q": cp.q, "A": cp.A, "B": cp.B, "C": cp.C, "D": cp.D},
            "d": cp.d,
            "lambda": [str(v) for v in lam.element.coords()],
            "lambda_value": fmt(lam.real_value, 15),
            "scale": pair.scale,
            "constants": {k: fmt(v, 15) for k, v in consts.as_dict().items()},
            "rows": [
                {
                    "Qn": row.q,
                    "Qnext": row.q_next,
                    "psi_digits": row.psi_digits,
                    "psi": str(row.psi) if row.psi is not None else None,
                    "product": fmt(row.product, 15) if row.product else None,
                    "bound": fmt(row.bound, 15),
                    "checked": row.checked,
                }
                for row in cert.rows
            ],
        }
        _emit(args, json.dumps(payload, indent=2) + "\n")
    else:
        _emit(args, "\n".join(lines) + "\n")
    return 0 if cert.all_satisfied() else 2


# ---------------------------------------------------------------------------
# table / ellipse / cf / stats / unit
# ---------------------------------------------------------------------------


def cmd_table(args) -> int:
    pair = _pair_from_args(args)
    ctx = RealCtx(args.prec_bits)
    lam = _lambda_from_args(args, pair, ctx)
    run = PeckRun(pair, lam, ctx, digit_budget=args.digit_budget)
    cf = run.convergents(args.max_q)
    cert = engine.psi_table(
        pair, lam, cf, ctx, consts=run.consts,
        max_q=args.max_q, digit_budget=args.digit_budget,
    )
    rows = ["Qn,psi_digits,psi,product,bound"]
    for r in cert.rows:
        psi_s = str(r.psi) if r.psi is not None else ""
        prod_s = fmt(r.product, 15) if r.product is not None else ""
        rows.append(f"{r.q},{r.psi_digits},{psi_s},{prod_s},{fmt(r.bound, 15)}")
    if args.format == "json":
        payload = [
            {
                "Qn": r.q,
                "psi_digits": r.psi_digits,
                "psi": str(r.psi) if r.psi is not None else None,
                "product": fmt(r.product, 15) if r.product is not None else None,
                "bound": fmt(r.bound, 15),
            }
            for r in cert.rows
        ]
        _emit(args, json.dumps(payload, indent=2) + "\n")
    else:
        _emit(args, "\n".join(rows) + "\n")
    return 0 if cert.all_satisfied() else 2


def cmd_ellipse(args) -> int:
    pair = _pair_from_args(args)
    ctx = RealCtx(args.prec_bits)
    lam = _lambda_from_args(args, pair, ctx)
    rows = ["n,u,v,residual"]
    for pt in engine.ellipse_points(lam, 1, args.n_max, ctx):
        rows.append(
            f"{pt.n},{fmt(pt.u, 15)},{fmt(pt.v, 15)},{fmt(pt.residual, 15)}"
        )
    _emit(args, "\n".join(rows) + "\n")
    return 0


def cmd_cf(args) -> int:
    pair = _pair_from_args(args)
    ctx = RealCtx(args.prec_bits)
    lam = _lambda_from_args(args, pair, ctx)
    cf = expand(engine.phi_over_pi_source(lam), args.depth, ctx)
    rows = ["n,a_n,P_n,Q_n"]
    for i, (a, (pn, qn)) in enumerate(zip(cf.quotients, cf.convergents)):
        rows.append(f"{i},{a},{pn},{qn}")
    _emit(args, "\n".join(rows) + "\n")
    return 0


def cmd_stats(args) -> int:
    if args.pair not in stats.NAMED_PAIRS:
        raise InputValidationError(
            f"--pair must be one of {sorted(stats.NAMED_PAIRS)}"
        )
    alpha, beta = stats.NAMED_PAIRS[args.pair]
    cfg = stats.HeuristicConfig(
        alpha=alpha,
        beta=beta,
        epsilon=args.epsilon if args.mode == "U" else None,
        C=args.bigc if args.mode == "V" else None,
        T=args.t_max,
    )
    rows = ["T,count,estimate"]
    for t, count, est in stats.series(cfg, args.mode, args.stride):
        rows.append(f"{t},{count},{est!r}")
    _emit(args, "\n".join(rows) + "\n")
    return 0


def cmd_unit(args) -> int:
    pair = _pair_from_args(args)
    ctx = RealCtx(args.prec_bits)
    lam = _lambda_from_args(args, pair, ctx)
    payload = {
        "coordinates": [str(v) for v in lam.element.coords()],
        "value": fmt(lam.real_value, 15),
        "norm": lam.norm_value,
        "d": pair.cp.d,
    }
    _emit(args, json.dumps(payload, indent=2) + "\n")
    return 0


# ---------------------------------------------------------------------------


# lets "--pq -6,47" style values through argparse's option heuristic
_NEGATIVE_TUPLE = re.compile(r"^-\d[\d,.-]*$")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="peckseq",
        description=(
            "Simultaneous Diophantine approximations from units of a cubic "
            "field with one real embedding, with certified product bounds."
        ),
    )
    ap._negative_number_matcher = _NEGATIVE_TUPLE
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("construct", help="full construction report")
    sp._negative_number_matcher = _NEGATIVE_TUPLE
    add_common(sp)
    sp.set_defaults(func=cmd_construct)

    sp = sub.add_parser("table", help="certified product table (CSV)")
    sp._negative_number_matcher = _NEGATIVE_TUPLE
    add_common(sp)
    sp.set_defaults(func=cmd_table)

    sp = sub.add_parser("ellipse", help="remainder ellipse points (CSV)")
    sp._negative_number_matcher = _NEGATIVE_TUPLE
    add_common(sp)
    sp.add_argument("--n-max", type=int, default=25)
    sp.set_defaults(func=cmd_ellipse)

    sp = sub.add_parser("cf", help="continued fraction of phi/pi (CSV)")
    sp._negative_number_matcher = _NEGATIVE_TUPLE
    add_common(sp)
    sp.set_defaults(func=cmd_cf)

    sp = sub.add_parser("stats", help="heuristic counters vs estimates (CSV)")
    sp.add_argument("--pair", required=True)
    sp.add_argument("--mode", choices=("U", "V"), default="U")
    sp.add_argument("--epsilon", type=float, default=0.2)
    sp.add_argument("--bigc", type=float, default=1.0)
    sp.add_argument("--t-max", type=int, default=1000)
    sp.add_argument("--stride", type=int, default=50)
    sp.add_argument("--out", default=None)
    sp.add_argument("--format", choices=("csv",), default="csv")
    sp.set_defaults(func=cmd_stats)

    sp = sub.add_parser("unit", help="find or validate the unit")
    sp._negative_number_matcher = _NEGATIVE_TUPLE
    add_common(sp)
    sp.set_defaults(func=cmd_unit)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BoundViolatedError as exc:
        print(f"bound violation: {exc}", file=sys.stderr)
        return 2
    except PrecisionError as exc:
        print(f"precision exhausted: {exc}", file=sys.stderr)
        return 3
    except InputValidationError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 4
    except PeckseqError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
