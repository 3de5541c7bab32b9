"""Certified arbitrary-precision real arithmetic on top of MPFR.

Every public operation returns a :class:`CertifiedReal`, an approximation
paired with an error radius that encloses the true value.  Two policies are
supported:

* ``recompute_at_double`` (default): a quantity is evaluated at P and 2P
  bits; the difference, padded by a guard of 40 bits relative to the 2P
  result, is taken as the radius.
* ``interval``: where an operation has a cheap rigorous enclosure (root
  isolation by exact sign checks, monotone functions evaluated with
  directed rounding) that enclosure is used directly.

Root isolation is always rigorous regardless of policy: the final bracket
is verified by exact rational sign evaluation of the cubic.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Callable

import gmpy2 as g

from .errors import (
    AmbiguousRoundingError,
    InputValidationError,
    PrecisionExhaustedError,
)

_ENV_CAP = "PECKSEQ_MAX_PREC_BITS"
_DEFAULT_MAX_PREC = 1 << 22  # ~1.26 million decimal digits
_GUARD_BITS = 40

RealSource = Callable[[int], "g.mpfr"]


def _env_max_prec() -> int:
    raw = os.environ.get(_ENV_CAP)
    if raw is None:
        return _DEFAULT_MAX_PREC
    try:
        cap = int(raw)
    except ValueError as exc:
        raise InputValidationError(f"{_ENV_CAP} must be an integer") from exc
    if cap < 64:
        raise InputValidationError(f"{_ENV_CAP} must be >= 64")
    return cap


def wctx(prec: int, **kwargs):
    """Working context: given precision, widest exponent range."""
    return g.context(
        precision=prec, emin=g.get_emin_min(), emax=g.get_emax_max(), **kwargs
    )


@dataclass(frozen=True)
class RealCtx:
    """Evaluation configuration: base precision and certification policy."""

    precision_bits: int = 256
    certification_policy: str = "recompute_at_double"
    max_precision_bits: int = field(default_factory=_env_max_prec)

    def __post_init__(self):
        if self.precision_bits < 64:
            raise InputValidationError("precision_bits must be >= 64")
        if self.certification_policy not in ("recompute_at_double", "interval"):
            raise InputValidationError(
                f"unknown certification policy {self.certification_policy!r}"
            )


@dataclass(frozen=True)
class CertifiedReal:
    """An enclosure [approximation - radius, approximation + radius]."""

    value: "g.mpfr"
    radius: "g.mpfr"

    @property
    def lo(self):
        with wctx(64, round=g.RoundDown):
            return self.value - self.radius

    @property
    def hi(self):
        with wctx(64, round=g.RoundUp):
            return self.value + self.radius

    def lo_exact(self) -> "g.mpq":
        return g.mpq(self.value) - g.mpq(self.radius)

    def hi_exact(self) -> "g.mpq":
        return g.mpq(self.value) + g.mpq(self.radius)

    def __float__(self):
        return float(self.value)

    def abs(self) -> "CertifiedReal":
        return CertifiedReal(abs(self.value), self.radius)

    def __repr__(self):
        return f"CertifiedReal({self.value!r}, radius={self.radius!r})"


def _radius_after(v_low, v_high):
    """Radius for recompute-at-double: |v_P - v_2P| plus a guard of
    2^-GUARD relative to the accepted value."""
    with wctx(64, round=g.RoundUp):
        d = abs(g.mpfr(v_low) - g.mpfr(v_high))
        if g.is_zero(v_high):
            return d
        _, e = v_high.as_mantissa_exp()
        # ulp(v_high) scaled up by the guard allowance
        return d + g.exp2(int(e) + _GUARD_BITS)


def certify(
    compute: RealSource,
    ctx: RealCtx,
    prec: int | None = None,
    rel_target: "g.mpfr | None" = None,
) -> CertifiedReal:
    """Certify ``compute`` under the recompute-at-double policy.

    ``compute(prec)`` must be a pure function of the precision.  When
    ``rel_target`` is given, the precision escalates (doubling) until
    radius <= rel_target * |value| or the cap is hit.
    """
    p = prec if prec is not None else ctx.precision_bits
    while True:
        with wctx(p):
            v1 = compute(p)
        with wctx(2 * p):
            v2 = compute(2 * p)
        radius = _radius_after(v1, v2)
        out = CertifiedReal(v2, radius)
        if rel_target is None:
            return out
        with wctx(64, round=g.RoundUp):
            need = abs(v2) * g.mpfr(rel_target)
        if radius <= need and not (g.is_zero(v2) and not g.is_zero(radius)):
            return out
        if 4 * p > ctx.max_precision_bits:
            raise PrecisionExhaustedError(
                f"needed more than {ctx.max_precision_bits} bits "
                f"(policy cap, see ${_ENV_CAP})"
            )
        p *= 2


def certify_many(compute, ctx: RealCtx, prec: int | None = None):
    """Like :func:`certify` for a compute returning a tuple of mpfrs.

    The whole chain is evaluated once at P and once at 2P; each component
    is certified from the pair of runs.
    """
    p = prec if prec is not None else ctx.precision_bits
    with wctx(p):
        first = compute(p)
    with wctx(2 * p):
        second = compute(2 * p)
    if len(first) != len(second):
        raise AssertionError("compute() changed arity between precisions")
    return tuple(
        CertifiedReal(v2, _radius_after(v1, v2)) for v1, v2 in zip(first, second)
    )


# ---------------------------------------------------------------------------
# mod-1 reduction: <x> = x - floor(x + 1/2), in [-1/2, 1/2)
# ---------------------------------------------------------------------------

_HALF = g.mpq(1, 2)


def mod1_exact(x) -> "g.mpq":
    """Signed distance representative of an exact rational."""
    x = g.mpq(x)
    return x - (x + _HALF) // 1


def mod1(x: CertifiedReal) -> CertifiedReal:
    """<x> for a certified real; the enclosure must not straddle a
    half-integer (raise the working precision and retry if it does)."""
    k_lo = (x.lo_exact() + _HALF) // 1
    k_hi = (x.hi_exact() + _HALF) // 1
    if k_lo != k_hi:
        raise AmbiguousRoundingError(
            "enclosure straddles a half-integer; raise precision"
        )
    k = g.mpz(k_lo)
    prec = max(x.value.precision, 64)
    with wctx(prec):
        v = g.mpfr(g.mpq(x.value) - k)
    with wctx(64, round=g.RoundUp):
        if g.is_zero(v):
            radius = g.mpfr(x.radius)
        else:
            _, e = v.as_mantissa_exp()
            radius = g.mpfr(x.radius) + g.exp2(int(e))
    return CertifiedReal(v, radius)


def nearest_integer(x: CertifiedReal) -> "g.mpz":
    """floor(x + 1/2) when unambiguous."""
    k_lo = (x.lo_exact() + _HALF) // 1
    k_hi = (x.hi_exact() + _HALF) // 1
    if k_lo != k_hi:
        raise AmbiguousRoundingError(
            "enclosure straddles a half-integer; raise precision"
        )
    return g.mpz(k_lo)


# ---------------------------------------------------------------------------
# Real root of x^3 - p x - q (exactly one real root assumed; validated by
# the caller through CubicParams)
# ---------------------------------------------------------------------------

_bracket_cache: dict = {}
_root_cache: dict = {}


def _cubic_sign(p: int, q: int, x: "g.mpq") -> int:
    v = x * x * x - p * x - q
    return int(g.sign(v))


def _isolating_bracket(p: int, q: int):
    """Rational bracket [lo, hi] of width <= 2^-64 around the real root,
    certified by exact sign changes."""
    key = (p, q)
    hit = _bracket_cache.get(key)
    if hit is not None:
        return hit
    bound = g.mpq(1 + max(abs(p), abs(q)))
    lo, hi = -bound, bound
    if _cubic_sign(p, q, lo) >= 0 or _cubic_sign(p, q, hi) <= 0:
        raise AssertionError("Cauchy bound failed to bracket the root")
    width = 2 * bound
    while width > g.mpq(1, 1 << 64):
        mid = (lo + hi) / 2
        s = _cubic_sign(p, q, mid)
        if s == 0:
            # rational root: exact value; zero-width bracket
            lo = hi = mid
            break
        if s < 0:
            lo = mid
        else:
            hi = mid
        width = hi - lo
    _bracket_cache[key] = (lo, hi)
    return lo, hi


def cubic_root_raw(p: int, q: int, prec: int) -> "g.mpfr":
    """The real root of x^3 - p x - q as an mpfr with error well below
    2^(-prec+4).  Newton refinement from a certified bracket, climbing a
    precision ladder (one step per doubling); best results are cached."""
    best = _root_cache.get((p, q))
    if best is not None and best.precision >= prec:
        return g.mpfr(best, precision=prec)
    lo, hi = _isolating_bracket(p, q)
    work = prec + 32
    with wctx(min(128, work)):
        x = (g.mpfr(lo) + g.mpfr(hi)) / 2  # ~64 correct bits
    level = 64
    while level < work:
        level = min(2 * level, work)
        with wctx(level + 16):
            x = g.mpfr(x)
            x = x - (x * x * x - p * x - q) / (3 * x * x - p)
    with wctx(work):
        for _ in range(2):
            x = g.mpfr(x)
            x = x - (x * x * x - p * x - q) / (3 * x * x - p)
        out = g.mpfr(x, precision=prec)
    _root_cache[(p, q)] = g.mpfr(x, precision=work)
    return out


def real_root(cp, ctx: RealCtx) -> CertifiedReal:
    """Certified enclosure of the real root of cp's cubic.

    The radius is rigorous: sign changes at value +- radius are verified
    in exact rational arithmetic.
    """
    prec = ctx.precision_bits
    p, q = cp.p, cp.q
    x = cubic_root_raw(p, q, prec)
    xq = g.mpq(x)
    with wctx(64, round=g.RoundUp):
        scale = max(abs(x), g.mpfr(1))
        eps = g.mpfr(scale * g.exp2(-prec + 4))
    for _ in range(8):
        eq = g.mpq(eps)
        if _cubic_sign(p, q, xq - eq) < 0 and _cubic_sign(p, q, xq + eq) > 0:
            return CertifiedReal(x, eps)
        with wctx(64, round=g.RoundUp):
            eps = eps * 4
    raise AssertionError("root certification failed to verify a bracket")


# ---------------------------------------------------------------------------
# Constants and elementary functions
# ---------------------------------------------------------------------------


def pi(ctx: RealCtx) -> CertifiedReal:
    with wctx(ctx.precision_bits):
        v = g.const_pi()
    return _correctly_rounded(v)


def const_e(ctx: RealCtx) -> CertifiedReal:
    with wctx(ctx.precision_bits):
        v = g.exp(g.mpfr(1))
    return _correctly_rounded(v)


def _correctly_rounded(v) -> CertifiedReal:
    with wctx(64, round=g.RoundUp):
        _, e = v.as_mantissa_exp()
        return CertifiedReal(v, g.exp2(int(e)))


def _monotone(fn, x: CertifiedReal, ctx: RealCtx) -> CertifiedReal:
    """Enclosure of a monotone increasing fn via directed rounding at the
    interval endpoints."""
    prec = ctx.precision_bits
    with wctx(prec, round=g.RoundDown):
        lo = fn(g.mpfr(x.value) - g.mpfr(x.radius))
    with wctx(prec, round=g.RoundUp):
        hi = fn(g.mpfr(x.value) + g.mpfr(x.radius))
    with wctx(prec):
        mid = (lo + hi) / 2
    with wctx(64, round=g.RoundUp):
        _, e = mid.as_mantissa_exp() if not g.is_zero(mid) else (None, -prec)
        radius = (g.mpfr(hi) - g.mpfr(lo)) / 2 + g.exp2(int(e) + 2)
    return CertifiedReal(mid, radius)


def arctan(x: CertifiedReal, ctx: RealCtx) -> CertifiedReal:
    return _monotone(g.atan, x, ctx)


def sqrt(x: CertifiedReal, ctx: RealCtx) -> CertifiedReal:
    if x.lo_exact() < 0:
        raise InputValidationError("sqrt of a possibly negative value")
    return _monotone(g.sqrt, x, ctx)


def log(x: CertifiedReal, ctx: RealCtx) -> CertifiedReal:
    if x.lo_exact() <= 0:
        raise InputValidationError("log of a possibly nonpositive value")
    return _monotone(g.log, x, ctx)


def from_rational(x, ctx: RealCtx) -> CertifiedReal:
    with wctx(ctx.precision_bits):
        v = g.mpfr(g.mpq(x))
    if g.mpq(v) == g.mpq(x):
        return CertifiedReal(v, g.mpfr(0))
    return _correctly_rounded(v)


def eval_element(e, prec: int) -> "g.mpfr":
    """sigma_1(e) = x + y*theta + z*theta^2 at the given working precision.

    Must be called inside (or will establish) a context of width prec.
    """
    theta = cubic_root_raw(e.cp.p, e.cp.q, prec + 16)
    with wctx(prec):
        return g.mpfr(e.x + e.y * g.mpq(theta) + e.z * g.mpq(theta) ** 2)


def certified_element(e, ctx: RealCtx, prec: int | None = None) -> CertifiedReal:
    return certify(lambda pr: eval_element(e, pr), ctx, prec=prec)
