"""Certified continued-fraction expansion of a re-evaluable real.

Quotients use the floor convention (a0 may be negative, all later
quotients >= 1).  A quotient is accepted only when two expansions at P and
2P bits agree on it exactly; the expander escalates the working precision
(doubling) until the requested depth is certified or the cap is reached.
"""

from __future__ import annotations

from dataclasses import dataclass

import gmpy2 as g

from .errors import CertificationFailedError, InputValidationError
from .realctx import RealCtx, RealSource, wctx


@dataclass(frozen=True)
class ContinuedFraction:
    """Partial quotients [a0; a1, a2, ...] with exact convergents P_n/Q_n."""

    quotients: tuple[int, ...]
    convergents: tuple[tuple[int, int], ...]
    certified_depth: int

    def __len__(self):
        return len(self.quotients)

    def noninteger_convergents(self) -> tuple[tuple[int, int], ...]:
        """Convergents with denominator > 1 (drops the integer ones)."""
        return tuple((p, q) for p, q in self.convergents if q != 1)

    def value(self) -> "g.mpq":
        """Fold the quotient list back into a rational."""
        if not self.quotients:
            raise InputValidationError("empty continued fraction")
        acc = g.mpq(self.quotients[-1])
        for a in reversed(self.quotients[:-1]):
            acc = a + 1 / acc
        return acc


def convergents_from_quotients(quotients) -> tuple[tuple[int, int], ...]:
    h_prev, h_prev2 = g.mpz(1), g.mpz(0)
    k_prev, k_prev2 = g.mpz(0), g.mpz(1)
    out = []
    for a in quotients:
        h = a * h_prev + h_prev2
        k = a * k_prev + k_prev2
        out.append((int(h), int(k)))
        h_prev2, h_prev = h_prev, h
        k_prev2, k_prev = k_prev, k
    return tuple(out)


def _raw_quotients(source: RealSource, prec: int, depth: int) -> list[int]:
    out: list[int] = []
    with wctx(prec):
        x = g.mpfr(source(prec))
        # once the tail is at noise level, further quotients are garbage
        noise = g.exp2(-(prec - 32))
        for _ in range(depth):
            a = g.floor(x)
            out.append(int(a))
            rem = x - a
            if g.is_zero(rem):
                break
            if rem < noise:
                break
            x = 1 / rem
    return out


def _common_prefix(a: list[int], b: list[int]) -> int:
    n = 0
    for x, y in zip(a, b):
        if x != y:
            break
        n += 1
    return n


def expand(source: RealSource, depth: int, ctx: RealCtx) -> ContinuedFraction:
    """First ``depth`` certified quotients of the source value.

    Raises CertificationFailedError carrying the stable prefix when the
    precision cap is reached first (e.g. for a value that is rational or
    not separable from one at the cap).
    """
    if depth < 1:
        raise InputValidationError("depth must be >= 1")
    prec = max(ctx.precision_bits, 192)
    best: list[int] = []
    while True:
        qa = _raw_quotients(source, prec, depth)
        qb = _raw_quotients(source, 2 * prec, depth)
        stable = _common_prefix(qa, qb)
        # exact termination: both runs ended on the same full quotient list
        if qa == qb and len(qa) < depth and stable == len(qa):
            ended_exactly = all(
                len(_raw_quotients(source, r * prec, depth)) == len(qa)
                for r in (4,)
            )
            if ended_exactly:
                quots = qa
                return ContinuedFraction(
                    quotients=tuple(quots),
                    convergents=convergents_from_quotients(quots),
                    certified_depth=len(quots),
                )
        if stable > len(best):
            best = qa[:stable]
        if stable >= depth:
            quots = qa[:depth]
            return ContinuedFraction(
                quotients=tuple(quots),
                convergents=convergents_from_quotients(quots),
                certified_depth=depth,
            )
        if 4 * prec > ctx.max_precision_bits:
            partial = ContinuedFraction(
                quotients=tuple(best),
                convergents=convergents_from_quotients(best),
                certified_depth=len(best),
            )
            raise CertificationFailedError(len(best), partial)
        prec *= 2


def expand_past_denominator(
    source: RealSource, q_threshold: int, ctx: RealCtx, max_depth: int = 256
) -> ContinuedFraction:
    """Expand until some certified convergent denominator exceeds
    q_threshold (so every convergent at or below the threshold has a
    certified successor)."""
    depth = 12
    while True:
        cf = expand(source, depth, ctx)
        if cf.convergents and cf.convergents[-1][1] > q_threshold:
            return cf
        if cf.certified_depth < depth or depth >= max_depth:
            # expansion terminated early (rational) or depth cap
            return cf
        depth = min(2 * depth, max_depth)
