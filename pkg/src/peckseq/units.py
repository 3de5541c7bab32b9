"""Locating a unit lambda > 1 of O_K inside (1/d)Z[theta].

The scan geometry follows the size bounds of the power sequences: a large
unit a + b*theta + c*theta^2 has b close to c*theta and a close to
c*(theta^2 - p), so for each numerator k of c = k/d only a narrow integer
window needs testing.  A c = 0 side branch catches units of the form
a + b*theta (e.g. theta itself when the constant term is -1).

Any accepted element must have |norm| = 1 and an integer characteristic
polynomial (so it is an algebraic integer, hence a genuine unit of O_K;
|norm| = 1 alone does not guarantee that for d > 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import gmpy2 as g

from . import realctx
from .errors import InvalidUnitError, UnitNotFoundError
from .field import CubicParams, FieldElement
from .realctx import CertifiedReal, RealCtx, certify, wctx


@dataclass(frozen=True)
class UnitCandidate:
    element: FieldElement
    real_value: CertifiedReal
    norm_value: int  # +1 or -1

    @property
    def cp(self) -> CubicParams:
        return self.element.cp


def _norm_form(i: int, j: int, k: int, p: int, q: int) -> int:
    """Norm numerator of (i + j*theta + k*theta^2): the cubic norm form."""
    ipk = i + p * k
    pjqk = p * j + q * k
    return (
        i * ipk * ipk
        - i * j * pjqk
        - q * k * j * ipk
        + q * k * k * pjqk
        + q * j**3
        - q * j * k * ipk
    )


def _is_algebraic_integer(e: FieldElement) -> bool:
    return e.trace().denominator == 1 and e.char_middle().denominator == 1


def validate(e: FieldElement, ctx: RealCtx) -> UnitCandidate:
    """Check the unit contract and wrap the element.

    Requires |norm| = 1 exactly, coordinates in (1/d)Z, an integer
    characteristic polynomial, and real value > 1.
    """
    d = e.cp.d
    for coord in e.coords():
        if (coord * d).denominator != 1:
            raise InvalidUnitError(f"coordinate {coord} is not in (1/{d})Z")
    n = e.norm()
    if abs(n) != 1:
        raise InvalidUnitError(f"|norm| = {abs(n)} != 1: not a unit")
    if not _is_algebraic_integer(e):
        raise InvalidUnitError(
            "characteristic polynomial is not integral: not in O_K"
        )
    value = _value_above_one(e, ctx)
    return UnitCandidate(element=e, real_value=value, norm_value=int(n))


def _value_above_one(e: FieldElement, ctx: RealCtx) -> CertifiedReal:
    prec = ctx.precision_bits
    while True:
        value = e.real_value(ctx, prec=prec)
        if value.lo_exact() > 1:
            return value
        if value.hi_exact() <= 1:
            raise InvalidUnitError(
                "element's real value is <= 1; orient it with normalize()"
            )
        prec *= 2
        if prec > ctx.max_precision_bits:
            raise InvalidUnitError("cannot separate unit value from 1")


def normalize(e: FieldElement, ctx: RealCtx) -> UnitCandidate:
    """Whichever of +-e, +-e^{-1} exceeds 1.

    Rejects +-1 (finite order) and non-units.
    """
    if e.y == 0 and e.z == 0:
        raise InvalidUnitError("element is rational: no infinite-order unit")
    if abs(e.norm()) != 1:
        raise InvalidUnitError(f"|norm| = {abs(e.norm())} != 1: not a unit")
    inv = e.inv()
    candidates = [e, -e, inv, -inv]
    prec = max(ctx.precision_bits, 128)
    values = [c.real_value(ctx, prec=prec) for c in candidates]
    best = max(range(4), key=lambda idx: values[idx].value)
    return validate(candidates[best], ctx)


def _divisors(n: int) -> list[int]:
    """Divisors of n from a small-prime factorization.  A composite
    cofactor beyond the trial bound contributes itself (missing some
    divisors of a pathological n costs completeness, never correctness)."""
    factors: dict[int, int] = {}
    m = n
    p = 2
    while p * p <= m and p < 10_000:
        while m % p == 0:
            factors[p] = factors.get(p, 0) + 1
            m //= p
        p += 1 if p == 2 else 2
    if m > 1:
        factors[m] = factors.get(m, 0) + 1
    divs = [1]
    for prime, mult in factors.items():
        divs = [dv * prime**e for dv in divs for e in range(mult + 1)]
    return sorted(set(divs))


def search(
    cp: CubicParams, ctx: RealCtx, k_max: int, window: int = 3
) -> UnitCandidate:
    """Scan for the smallest unit > 1 of O_K visible in (1/d)Z[theta].

    For each divisor d' of d the (1/d')-sublattice is scanned with
    numerators k = 1..k_max (c = k/d'); the d' = 1 pass always exists and
    covers the units of the order Z[theta], so a hit is found for any
    valid d once k_max is large enough.  Raises UnitNotFoundError when
    every pass is exhausted.
    """
    if k_max < 1 or window < 1:
        raise InvalidUnitError("k_max and window must be >= 1")
    p, q, d = cp.p, cp.q, cp.d
    w1 = window + 1

    scan_prec = 192
    theta = realctx.cubic_root_raw(p, q, scan_prec)
    with wctx(scan_prec):
        theta2p = theta * theta - p
        abs_theta = abs(theta)
        three_t2_p = 3 * theta * theta - p
        # additive slack of any window candidate around its asymptotic value
        slack = w1 * (1 + abs_theta)

    best: tuple | None = None  # (value mpfr, (i, j, k), d')

    def consider(i: int, j: int, k: int, den: int, target: int):
        nonlocal best
        if abs(_norm_form(i, j, k, p, q)) != target:
            return
        # |norm| = 1 in (1/den)Z[theta] does not imply a unit of O_K:
        # the characteristic polynomial must be integral as well
        if (3 * i + 2 * p * k) % den:
            return
        s2 = 3 * i * i + 4 * p * i * k + p * p * k * k - p * j * j - 3 * q * j * k
        if s2 % (den * den):
            return
        with wctx(scan_prec):
            val = (i + j * theta + k * theta * theta) / den
            if val <= 1 + g.exp2(-100):
                return
            if best is None or val < best[0]:
                best = (val, (i, j, k), den)

    for den in _divisors(d):
        target = den**3
        for k in range(1, k_max + 1):
            with wctx(scan_prec):
                jc = int(g.floor(k * theta))
                ic = int(g.floor(k * theta2p))
                # below this line no candidate of this pass can win
                floor_val = (min(k * three_t2_p, 2 * k * abs_theta) - slack) / den
            if best is not None and floor_val > best[0]:
                break
            for j in range(jc - window, jc + w1 + 1):
                for i in range(ic - window, ic + w1 + 1):
                    consider(i, j, k, den, target)
            for sj in (k, -k):
                # a tracks b*theta: center the i window on sj*theta
                with wctx(scan_prec):
                    center = int(g.floor(sj * theta))
                for i in range(center - window, center + w1 + 1):
                    consider(i, sj, 0, den, target)

    if best is None:
        raise UnitNotFoundError(k_max)
    (i, j, k), den = best[1], best[2]
    e = cp.element(g.mpq(i, den), g.mpq(j, den), g.mpq(k, den))
    return validate(e, ctx)


def log_ratio(a: UnitCandidate, b: UnitCandidate, ctx: RealCtx) -> CertifiedReal:
    """log(a) / log(b): a near-integer value certifies that a is an exact
    power of b (used to accept powers of the expected unit)."""

    def compute(prec):
        va = realctx.eval_element(a.element, prec)
        vb = realctx.eval_element(b.element, prec)
        return g.log(va) / g.log(vb)

    return certify(compute, ctx)
