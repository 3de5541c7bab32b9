"""Power-sequence generation, constructed constants, Littlewood products,
certified product bounds, and the ellipse of renormalized remainders.

Notation used throughout (all exact unless marked certified):

* lambda^n = a_n + b_n*theta + c_n*theta^2 with rational a_n, b_n, c_n
* X_n = a_n + p c_n - b_n theta,  Y_n = a_n + p c_n - c_n theta^2,
  Z_n = b_n theta - c_n theta^2          (certified reals)
* k_n = d c_n,  m_n = scale * c_n  with scale = 9 A^2 s d (general) or
  A^2 s d when the source cubic has B = 0
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterator

import gmpy2 as g

from . import realctx
from .contfrac import ContinuedFraction, expand_past_denominator
from .errors import (
    AmbiguousRoundingError,
    BoundViolatedError,
    DenominatorBoundError,
    DigitBudgetExceededError,
    InputValidationError,
)
from .field import AffineMap, CubicParams, FieldElement, depress
from .realctx import (
    CertifiedReal,
    RealCtx,
    certify,
    certify_many,
    mod1,
    nearest_integer,
    wctx,
)
from .units import UnitCandidate


def digit_count(m) -> int:
    """Exact decimal digit count of a positive integer."""
    m = g.mpz(m)
    if m <= 0:
        raise InputValidationError("digit_count needs a positive integer")
    nd = m.num_digits(10)
    if m < g.mpz(10) ** (nd - 1):
        nd -= 1
    return nd


# ---------------------------------------------------------------------------
# Target pair
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TargetPair:
    """alpha = the real root of the source cubic; beta given by exact
    coordinates (r0 + r1*alpha + r2*alpha^2)/s in the power basis."""

    cp: CubicParams
    fmap: AffineMap
    r0: int
    r1: int
    r2: int
    s: int

    def __post_init__(self):
        if self.s <= 0:
            raise InputValidationError("beta denominator s must be positive")

    @classmethod
    def from_cubic(
        cls,
        A: int,
        B: int,
        C: int,
        D: int,
        beta=(0, 0, 1, 1),
        d: int | None = None,
    ) -> "TargetPair":
        cp, fmap = depress(A, B, C, D, d=d)
        r0, r1, r2, s = _reduce_beta(beta)
        return cls(cp=cp, fmap=fmap, r0=r0, r1=r1, r2=r2, s=s)

    @classmethod
    def from_pq(cls, p: int, q: int, beta=(0, 0, 1, 1), d: int | None = None):
        """Depressed cubic given directly: the pair defaults to
        (theta, theta^2)."""
        cp = CubicParams.from_pq(p, q, d=d)
        r0, r1, r2, s = _reduce_beta(beta)
        return cls(
            cp=cp, fmap=AffineMap(mult=1, shift=0), r0=r0, r1=r1, r2=r2, s=s
        )

    @property
    def A(self) -> int:
        return self.cp.A

    @property
    def B(self) -> int:
        return self.cp.B

    @property
    def b_zero(self) -> bool:
        return self.B == 0

    @property
    def scale(self) -> int:
        base = self.A**2 * self.s * self.cp.d
        return base if self.b_zero else 9 * base

    @cached_property
    def alpha_element(self) -> FieldElement:
        m, b = self.fmap.mult, self.fmap.shift
        return self.cp.element(g.mpq(-b, m), g.mpq(1, m), 0)

    @cached_property
    def beta_element(self) -> FieldElement:
        a = self.alpha_element
        num = self.r0 + self.r1 * a + self.r2 * (a * a)
        return num * g.mpq(1, self.s)

    def alpha_source(self):
        return lambda prec: realctx.eval_element(self.alpha_element, prec)

    def beta_source(self):
        return lambda prec: realctx.eval_element(self.beta_element, prec)

    def beta_is_rational(self) -> bool:
        return self.r1 == 0 and self.r2 == 0

    def beta_is_dependent(self) -> bool:
        """1, alpha, beta rationally dependent (no alpha^2 term)."""
        return self.r2 == 0


def _reduce_beta(beta) -> tuple[int, int, int, int]:
    r0, r1, r2, s = (int(v) for v in beta)
    if s == 0:
        raise InputValidationError("beta denominator s must be nonzero")
    if s < 0:
        r0, r1, r2, s = -r0, -r1, -r2, -s
    common = int(g.gcd(g.gcd(g.mpz(r0), g.mpz(r1)), g.gcd(g.mpz(r2), g.mpz(s))))
    return r0 // common, r1 // common, r2 // common, s // common


# ---------------------------------------------------------------------------
# Power records
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PowerRecord:
    n: int
    a: "g.mpq"
    b: "g.mpq"
    c: "g.mpq"
    k: "g.mpz"
    m: "g.mpz"
    X: CertifiedReal | None = None
    Y: CertifiedReal | None = None
    Z: CertifiedReal | None = None


def _as_scaled_int(value: "g.mpq", factor: int, what: str) -> "g.mpz":
    scaled = value * factor
    if scaled.denominator != 1:
        raise DenominatorBoundError(
            f"{what} has denominator {value.denominator}: "
            "the supplied d does not bound this field's denominators"
        )
    return g.mpz(scaled)


def _coord_bits(e: FieldElement) -> int:
    return max(
        int(abs(v.numerator).bit_length() + v.denominator.bit_length())
        for v in e.coords()
    )


def _xyz(e: FieldElement, ctx: RealCtx) -> tuple[CertifiedReal, ...]:
    """Certified X, Y, Z for lambda^n given as an element.

    The differences cancel almost completely (size ~ lambda^{-n/2} from
    coordinates of size lambda^n), so the working precision scales with
    1.5x the coordinate size.
    """
    cp = e.cp
    p = cp.p
    a, b, c = e.coords()
    bits = _coord_bits(e)
    prec = bits + bits // 2 + 96

    x_el = cp.element(a + p * c, -b, 0)
    y_el = cp.element(a + p * c, 0, -c)
    z_el = cp.element(0, b, -c)

    def compute(pr):
        return (
            realctx.eval_element(x_el, pr),
            realctx.eval_element(y_el, pr),
            realctx.eval_element(z_el, pr),
        )

    return certify_many(compute, ctx, prec=prec)


def power_record(
    lam: UnitCandidate,
    n: int,
    ctx: RealCtx,
    scale: int | None = None,
    with_xyz: bool = False,
) -> PowerRecord:
    """lambda^n by repeated squaring (for isolated indices)."""
    e = lam.element**n
    return _record_from_element(e, n, ctx, scale, with_xyz)


def _record_from_element(e, n, ctx, scale, with_xyz) -> PowerRecord:
    d = e.cp.d
    k = _as_scaled_int(e.z, d, f"c_{n}")
    m = _as_scaled_int(e.z, scale, f"c_{n}") if scale is not None else k
    x = y = z = None
    if with_xyz:
        x, y, z = _xyz(e, ctx)
    return PowerRecord(n=n, a=e.x, b=e.y, c=e.z, k=k, m=m, X=x, Y=y, Z=z)


def generate(
    lam: UnitCandidate,
    n_lo: int,
    n_hi: int,
    ctx: RealCtx,
    scale: int | None = None,
    with_xyz: bool = False,
) -> Iterator[PowerRecord]:
    """Stream lambda^n for n = n_lo..n_hi: one multiply per step."""
    if n_lo < 1:
        raise InputValidationError("n_lo must be >= 1")
    e = lam.element**n_lo
    for n in range(n_lo, n_hi + 1):
        yield _record_from_element(e, n, ctx, scale, with_xyz)
        if n < n_hi:
            e = e * lam.element


# ---------------------------------------------------------------------------
# Rotation angle phi and its ratio to pi
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RotationAngle:
    value: CertifiedReal
    degenerate: bool  # arctan argument denominator vanished at the cap


def phi(lam: UnitCandidate, ctx: RealCtx) -> RotationAngle:
    """phi = arctan(sqrt(3 theta^2 - 4p) (b1 - c1 theta)
                    / (2(a1 + p c1) - b1 theta - c1 theta^2)).

    The denominator is sigma_1 of a nonzero element, hence never exactly
    zero; a zero enclosure at the precision cap is flagged instead of
    silently patched.
    """
    cp = lam.element.cp
    p = cp.p
    a1, b1, c1 = lam.element.coords()
    den_el = cp.element(2 * (a1 + p * c1), -b1, -c1)

    def compute(prec):
        th = realctx.cubic_root_raw(cp.p, cp.q, prec)
        num = g.sqrt(3 * th * th - 4 * p) * g.mpfr(b1 - c1 * g.mpq(th))
        den = realctx.eval_element(den_el, prec)
        return g.atan(num / den)

    prec = ctx.precision_bits
    while True:
        den_cr = certify(
            lambda pr: realctx.eval_element(den_el, pr), ctx, prec=prec
        )
        if den_cr.lo_exact() > 0 or den_cr.hi_exact() < 0:
            return RotationAngle(value=certify(compute, ctx, prec=prec), degenerate=False)
        prec *= 2
        if prec > ctx.max_precision_bits:
            half_pi = certify(
                lambda pr: g.const_pi() / (2 * g.sign(b1 - c1 * g.mpq(
                    realctx.cubic_root_raw(cp.p, cp.q, pr)))),
                ctx,
            )
            return RotationAngle(value=half_pi, degenerate=True)


def phi_over_pi_source(lam: UnitCandidate):
    cp = lam.element.cp
    p = cp.p
    a1, b1, c1 = lam.element.coords()
    den_el = cp.element(2 * (a1 + p * c1), -b1, -c1)

    def source(prec):
        th = realctx.cubic_root_raw(cp.p, cp.q, prec)
        num = g.sqrt(3 * th * th - 4 * p) * g.mpfr(b1 - c1 * g.mpq(th))
        den = realctx.eval_element(den_el, prec)
        return g.atan(num / den) / g.const_pi()

    return source


# ---------------------------------------------------------------------------
# Constructed constants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstantsBundle:
    c1: CertifiedReal
    c2: CertifiedReal
    c3: CertifiedReal
    m_theta: CertifiedReal
    m_alpha: CertifiedReal
    m_beta1: CertifiedReal
    m_beta2: CertifiedReal
    n_tilde: CertifiedReal
    n0: CertifiedReal
    c0: CertifiedReal
    phi: CertifiedReal

    def as_dict(self):
        return {
            "C1": self.c1,
            "C2": self.c2,
            "C3": self.c3,
            "M_theta": self.m_theta,
            "M_alpha": self.m_alpha,
            "M_beta1": self.m_beta1,
            "M_beta2": self.m_beta2,
            "N_tilde": self.n_tilde,
            "n0": self.n0,
            "C0": self.c0,
            "phi": self.phi,
        }


def constants(pair: TargetPair, lam: UnitCandidate, ctx: RealCtx) -> ConstantsBundle:
    """All constants of the construction, certified to at least 6
    significant digits (escalating as needed)."""
    cp = pair.cp
    p, d = cp.p, cp.d
    A, B, s = pair.A, abs(pair.B), pair.s
    r1, r2 = abs(pair.r1), abs(pair.r2)
    b_zero = pair.b_zero
    lam_el = lam.element

    def compute(prec):
        th = realctx.cubic_root_raw(cp.p, cp.q, prec)
        lam_v = realctx.eval_element(lam_el, prec)
        abs_th = abs(th)
        sq2 = g.sqrt(g.mpfr(2))
        s34 = g.sqrt(3 * th * th - 4 * p)
        s3p = g.sqrt(3 * th * th - p)
        c1 = max(sq2, sq2 * abs_th / s34)
        c2 = g.sqrt(g.mpfr(d)) / s3p
        c3 = max(g.mpfr(1), 3 * c2 / 2)
        m_th = max(3 * d * sq2 * c1 * c2 / (2 * abs_th), 3 * d * c1 * c2 / 2)
        if b_zero:
            m_al = A * A * m_th
            m_b2 = A * A * g.mpfr(s) ** g.mpq(3, 2) * (
                3 * d * c2 * g.const_pi() / (2 * s34)
            )
            denom = A
            extra = (4 * A * m_th,)
        else:
            m_al = max(9 * A * A * m_th, 3 * A * m_th * (1 + 2 * B))
            m_b2 = 9 * A * A * g.mpfr(s) ** g.mpq(3, 2) * (
                3 * d * c2 * g.const_pi() / (2 * s34)
            )
            denom = 3 * A
            extra = (12 * A * m_th, 16 * B * m_th)
        m_b1 = g.mpfr(s) ** g.mpq(3, 2) * (r1 + r2) * m_al
        n_tilde = max(
            g.sqrt(lam_v),
            2 * sq2 * d * c1 / abs_th,
            2 * d * c1,
            g.cbrt(2 * (1 + sq2) * c2),
            *extra,
            8 * m_al * r1 / denom,
            8 * m_al * r2 / denom,
            4 * s * m_al / denom,
        )
        c0 = m_b1 * m_b2
        n0 = 2 * g.log(n_tilde) / g.log(lam_v)
        return (c1, c2, c3, m_th, m_al, m_b1, m_b2, n_tilde, n0, c0)

    prec = max(ctx.precision_bits, 192)
    while True:
        vals = certify_many(compute, ctx, prec=prec)
        if all(_sig_digits_at_least(v, 6) for v in vals):
            break
        prec *= 2
        if prec > ctx.max_precision_bits:
            raise AmbiguousRoundingError("constants did not certify to 6 digits")
    angle = phi(lam, ctx)
    return ConstantsBundle(*vals, phi=angle.value)


def _sig_digits_at_least(v: CertifiedReal, digs: int) -> bool:
    if g.is_zero(v.value):
        return g.is_zero(v.radius)
    with wctx(64, round=g.RoundUp):
        return v.radius <= abs(v.value) * g.exp2(-int(digs * 3.33) - 4)


# ---------------------------------------------------------------------------
# Littlewood products
# ---------------------------------------------------------------------------


def _cr_scale_int(x: CertifiedReal, m) -> CertifiedReal:
    m = g.mpz(m)
    with wctx(max(x.value.precision + int(m.bit_length()) + 8, 64)):
        v = x.value * m  # exact: integer times dyadic
    with wctx(64, round=g.RoundUp):
        r = g.mpfr(x.radius) * m
    return CertifiedReal(v, r)


def _cr_mul(x: CertifiedReal, y: CertifiedReal) -> CertifiedReal:
    prec = max(x.value.precision, y.value.precision, 64)
    with wctx(prec):
        v = x.value * y.value
    with wctx(64, round=g.RoundUp):
        r = (
            abs(g.mpfr(x.value)) * y.radius
            + abs(g.mpfr(y.value)) * x.radius
            + x.radius * y.radius
        )
        if not g.is_zero(v):
            _, e = v.as_mantissa_exp()
            r += g.exp2(int(e) + 1)
    return CertifiedReal(v, r)


@dataclass(frozen=True)
class LittlewoodRow:
    m: "g.mpz"
    frac_alpha: CertifiedReal  # <m alpha>
    frac_beta: CertifiedReal  # <m beta>
    product: CertifiedReal  # m ||m alpha|| ||m beta||
    sqrt_alpha: CertifiedReal  # m^(1/2) <m alpha>
    sqrt_beta: CertifiedReal  # m^(1/2) <m beta>


def littlewood_row(
    m, alpha_source, beta_source, ctx: RealCtx, prec: int | None = None
) -> LittlewoodRow:
    """The five headline quantities for a single multiplier m.

    Working precision defaults to bit_length(m) + 64 guard bits (all of
    m's integer digits are needed before its fractional parts mean
    anything), escalating on ambiguous rounding.
    """
    m = g.mpz(m)
    if m < 1:
        raise InputValidationError("multiplier must be >= 1")
    p = prec if prec is not None else int(m.bit_length()) + 64
    while True:
        try:
            fa = mod1(certify(lambda pr: m * alpha_source(pr), ctx, prec=p))
            fb = mod1(certify(lambda pr: m * beta_source(pr), ctx, prec=p))
            break
        except AmbiguousRoundingError:
            p *= 2
            if p > ctx.max_precision_bits:
                raise

    product = _cr_mul(_cr_scale_int(fa.abs(), m), fb.abs())
    sqrt_m = certify(lambda pr: g.sqrt(g.mpfr(m)), ctx, prec=p)
    return LittlewoodRow(
        m=m,
        frac_alpha=fa,
        frac_beta=fb,
        product=product,
        sqrt_alpha=_cr_mul(sqrt_m, fa),
        sqrt_beta=_cr_mul(sqrt_m, fb),
    )


# ---------------------------------------------------------------------------
# The certified product bound along the convergent subsequence
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PsiRow:
    q: int  # Q_n (index into the power sequence)
    q_next: int  # Q_{n+1}
    psi: "g.mpz | None"  # exact m_{Q_n}, or None above the digit budget
    psi_digits: int
    product: CertifiedReal | None
    bound: CertifiedReal  # C0 / Q_{n+1}
    checked: bool  # Q_n > n0, so the bound applies
    satisfied: bool


@dataclass(frozen=True)
class PeckCertificate:
    bound_constant: CertifiedReal  # C0
    threshold: CertifiedReal  # n0
    rows: tuple[PsiRow, ...]

    def all_satisfied(self) -> bool:
        return all(r.satisfied for r in self.rows if r.checked)


def psi_table(
    pair: TargetPair,
    lam: UnitCandidate,
    cf: ContinuedFraction,
    ctx: RealCtx,
    consts: ConstantsBundle | None = None,
    max_q: int | None = 10_000,
    rows: int | None = None,
    digit_budget: int = 50_000,
) -> PeckCertificate:
    """One row per non-integer convergent denominator Q_n (while a
    successor exists): psi_n = m_{Q_n}, the certified Littlewood product,
    and the bound C0/Q_{n+1}.

    Rows with Q_n > n0 are bound-checked; a certified violation raises
    BoundViolatedError (it would falsify the construction).  psi beyond
    the digit budget is reported by exact digit count only.
    """
    if consts is None:
        consts = constants(pair, lam, ctx)
    denominators = [q for _, q in cf.noninteger_convergents()]
    alpha_src = pair.alpha_source()
    beta_src = pair.beta_source()
    scale = pair.scale

    n0_hi = consts.n0.hi_exact()
    out: list[PsiRow] = []
    for i in range(len(denominators) - 1):
        q_n, q_next = denominators[i], denominators[i + 1]
        if max_q is not None and q_n > max_q:
            break
        if rows is not None and len(out) >= rows:
            break
        q_next_exact = g.mpfr(q_next, precision=max(64, int(q_next).bit_length() + 1))
        with wctx(max(consts.c0.value.precision, 64)):
            bval = consts.c0.value / q_next
        with wctx(64, round=g.RoundUp):
            brad = consts.c0.radius / q_next_exact
            if not g.is_zero(bval):
                _, e = bval.as_mantissa_exp()
                brad += g.exp2(int(e) + 1)
        bound = CertifiedReal(bval, brad)

        est_digits = _estimated_digits(pair, lam, q_n, ctx)
        if est_digits > digit_budget + 2:
            psi_val = None
            nd = _certified_digits(pair, lam, q_n, ctx, digit_budget)
            product = None
            checked = False
            satisfied = True
        else:
            rec = power_record(lam, q_n, ctx, scale=scale)
            psi_val = rec.m
            if psi_val == 0:
                # degenerate early index (c_{Q_n} = 0): nothing to bound
                out.append(
                    PsiRow(
                        q=q_n,
                        q_next=q_next,
                        psi=psi_val,
                        psi_digits=0,
                        product=None,
                        bound=bound,
                        checked=False,
                        satisfied=True,
                    )
                )
                continue
            nd = digit_count(psi_val)
            if nd > digit_budget:
                psi_val = None
                product = None
                checked = False
                satisfied = True
            else:
                lw = littlewood_row(psi_val, alpha_src, beta_src, ctx)
                product = lw.product
                checked = g.mpq(q_n) > n0_hi
                satisfied = True
                if checked:
                    satisfied = _bound_holds(product, bound, ctx)
                    if not satisfied:
                        raise BoundViolatedError(
                            f"product at Q_n={q_n} certifiably exceeds "
                            f"C0/Q_(n+1); this falsifies the construction"
                        )
        out.append(
            PsiRow(
                q=q_n,
                q_next=q_next,
                psi=psi_val,
                psi_digits=nd,
                product=product,
                bound=bound,
                checked=checked,
                satisfied=satisfied,
            )
        )
    return PeckCertificate(
        bound_constant=consts.c0, threshold=consts.n0, rows=tuple(out)
    )


def _bound_holds(product: CertifiedReal, bound: CertifiedReal, ctx: RealCtx) -> bool:
    if product.hi_exact() <= bound.lo_exact():
        return True
    if product.lo_exact() > bound.hi_exact():
        return False
    raise AmbiguousRoundingError(
        "product and bound enclosures overlap; raise precision"
    )


def _estimated_digits(pair, lam, n: int, ctx) -> int:
    """Quick digit estimate of m_n from n*log10(lambda)."""
    with wctx(96):
        lam_v = realctx.eval_element(lam.element, 96)
        th = realctx.cubic_root_raw(pair.cp.p, pair.cp.q, 96)
        log10m = (
            n * g.log10(lam_v)
            - g.log10(3 * th * th - pair.cp.p)
            + g.log10(g.mpfr(pair.scale) / pair.cp.d)
        )
        return int(g.floor(log10m)) + 1


def _certified_digits(pair, lam, n: int, ctx, digit_budget: int) -> int:
    """Exact digit count of m_n without materializing it.

    Uses the two-sided bound |lambda^n - (3 theta^2 - p) c_n| <
    (1+sqrt2) C1 / lambda^{n/2} to enclose log10(m_n) rigorously; falls
    back to the exact integer when the enclosure straddles a power of 10.
    """

    def compute(prec):
        lam_v = realctx.eval_element(lam.element, prec)
        th = realctx.cubic_root_raw(pair.cp.p, pair.cp.q, prec)
        sq2 = g.sqrt(g.mpfr(2))
        c1 = max(sq2, sq2 * abs(th) / g.sqrt(3 * th * th - 4 * pair.cp.p))
        eta = (1 + sq2) * c1
        center = lam_v**n / (3 * th * th - pair.cp.p)
        slack = eta / lam_v ** g.mpq(n, 2) / (3 * th * th - pair.cp.p)
        lo = (center - slack) * pair.scale / pair.cp.d
        hi = (center + slack) * pair.scale / pair.cp.d
        return g.log10(lo), g.log10(hi)

    lo_cr, hi_cr = certify_many(compute, ctx, prec=256)
    f_lo = g.mpz((lo_cr.lo_exact()) // 1)
    f_hi = g.mpz((hi_cr.hi_exact()) // 1)
    if f_lo == f_hi:
        return int(f_lo) + 1
    if _estimated_digits(pair, lam, n, ctx) <= 4 * digit_budget:
        rec = power_record(lam, n, ctx, scale=pair.scale)
        return digit_count(rec.m)
    raise DigitBudgetExceededError(
        f"digit count at n={n} straddles a power of 10 beyond the budget"
    )


# ---------------------------------------------------------------------------
# Ellipse of renormalized remainders
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EllipsePoint:
    n: int
    u: CertifiedReal  # k_n^(1/2) <k_n theta>
    v: CertifiedReal  # k_n^(1/2) <k_n theta^2>
    residual: CertifiedReal  # distance from the limiting ellipse equation


def ellipse_points(
    lam: UnitCandidate, n_lo: int, n_hi: int, ctx: RealCtx
) -> Iterator[EllipsePoint]:
    """Points (u_n, v_n) and the residual of
    (theta u - 2 v)^2 + (3 theta^2 - 4p) u^2 - 4 d^3/(3 theta^2 - p)."""
    cp = lam.element.cp
    p, q, d = cp.p, cp.q, cp.d
    for rec in generate(lam, n_lo, n_hi, ctx):
        k = rec.k
        if k <= 0:
            continue
        bits = int(k.bit_length())
        base_prec = 2 * bits + 160
        n1 = nearest_integer(
            certify(
                lambda pr: k * realctx.cubic_root_raw(p, q, pr), ctx, prec=base_prec
            )
        )
        n2 = nearest_integer(
            certify(
                lambda pr: k * realctx.cubic_root_raw(p, q, pr) ** 2,
                ctx,
                prec=base_prec,
            )
        )

        def compute(pr, k=k, n1=n1, n2=n2):
            th = realctx.cubic_root_raw(p, q, pr)
            sk = g.sqrt(g.mpfr(k))
            u = sk * (k * th - n1)
            v = sk * (k * th * th - n2)
            res = (th * u - 2 * v) ** 2 + (3 * th * th - 4 * p) * u * u - g.mpq(
                4 * d**3
            ) / (3 * th * th - p)
            return u, v, res

        u, v, res = certify_many(compute, ctx, prec=base_prec)
        yield EllipsePoint(n=rec.n, u=u, v=v, residual=res)


# ---------------------------------------------------------------------------
# Degenerate (rational / dependent) targets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SequenceSpec:
    """Multiplier construction for pairs outside the generic case.

    kind "zero_products": every Littlewood product along the sequence is
    eventually zero (one of the norms vanishes identically).
    kind "bounded_products": m_n ||m_n alpha|| < alpha_bound and
    m_n ||m_n beta|| < beta_bound eventually.
    multiplier: m_n = factor * base_n where base_n is n itself or the
    n-th convergent denominator of alpha.
    """

    kind: str
    factor: int
    base: str  # "index" | "alpha_convergents"
    alpha_bound: Fraction
    beta_bound: Fraction


def rational_case(
    alpha_rational: Fraction | None, r1: int, r2: int, s: int
) -> SequenceSpec:
    """beta = (r1*alpha + r2)/s with s > 0; alpha_rational is None when
    alpha is a (cubic) irrational."""
    if s <= 0:
        raise InputValidationError("s must be positive")
    if alpha_rational is not None:
        alpha = Fraction(alpha_rational)
        beta = (r1 * alpha + r2) / s
        factor = alpha.denominator * beta.denominator
        return SequenceSpec(
            kind="zero_products",
            factor=factor,
            base="index",
            alpha_bound=Fraction(0),
            beta_bound=Fraction(0),
        )
    if r1 == 0:
        beta = Fraction(r2, s)
        v = beta.denominator
        return SequenceSpec(
            kind="zero_products",
            factor=v,
            base="alpha_convergents",
            alpha_bound=Fraction(v * v),
            beta_bound=Fraction(0),
        )
    return SequenceSpec(
        kind="bounded_products",
        factor=s,
        base="alpha_convergents",
        alpha_bound=Fraction(s * s),
        beta_bound=Fraction(s * abs(r1)),
    )


def rational_case_for_pair(pair: TargetPair) -> SequenceSpec:
    if not pair.beta_is_dependent():
        raise InputValidationError("pair is not rationally dependent")
    return rational_case(None, pair.r1, pair.r0, pair.s)


# ---------------------------------------------------------------------------
# End-to-end run
# ---------------------------------------------------------------------------


@dataclass
class PeckRun:
    """Pipeline state for one (alpha, beta) target: unit, rotation angle,
    convergents, constants, and the certified table."""

    pair: TargetPair
    lam: UnitCandidate
    ctx: RealCtx
    digit_budget: int = 50_000

    @cached_property
    def consts(self) -> ConstantsBundle:
        return constants(self.pair, self.lam, self.ctx)

    def convergents(self, q_threshold: int) -> ContinuedFraction:
        return expand_past_denominator(
            phi_over_pi_source(self.lam), q_threshold, self.ctx
        )

    def certificate(self, max_q: int = 10_000) -> PeckCertificate:
        cf = self.convergents(max_q)
        return psi_table(
            self.pair,
            self.lam,
            cf,
            self.ctx,
            consts=self.consts,
            max_q=max_q,
            digit_budget=self.digit_budget,
        )
