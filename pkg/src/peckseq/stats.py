"""Empirical counters for small Littlewood products and their closed-form
expectations under the independence heuristic.

U_eps(T) counts n <= T with n ||n a|| ||n b|| < eps; V_C(T) counts n <= T
with n log(n) ||n a|| ||n b|| < C.  The expectations F_eps and G_C come
from integrating P(|XY| < r) = 4r(1 - log 4r) for independent uniforms.
All logarithms are natural.
"""

from __future__ import annotations

from dataclasses import dataclass

import gmpy2 as g

from . import realctx
from .errors import AmbiguousRoundingError, InputValidationError
from .realctx import RealCtx, RealSource, certify, wctx


# ---------------------------------------------------------------------------
# The four standard pairs used in the comparison figures
# ---------------------------------------------------------------------------


def _sqrt_source(n: int) -> RealSource:
    return lambda prec: g.sqrt(g.mpfr(n))


def _golden(prec: int):
    return (1 + g.sqrt(g.mpfr(5))) / 2


def _sqrt65_over_5(prec: int):
    return g.sqrt(g.mpfr(65)) / 5


def _e(prec: int):
    return g.exp(g.mpfr(1))


def _pi(prec: int):
    return g.const_pi()


def _cbrt2(prec: int):
    return realctx.cubic_root_raw(0, 2, prec)


def _cbrt4(prec: int):
    th = realctx.cubic_root_raw(0, 2, prec)
    return th * th


NAMED_PAIRS: dict[str, tuple[RealSource, RealSource]] = {
    "sqrt2-sqrt3": (_sqrt_source(2), _sqrt_source(3)),
    "e-pi": (_e, _pi),
    "cbrt2-cbrt4": (_cbrt2, _cbrt4),
    "golden-sqrt65over5": (_golden, _sqrt65_over_5),
}


@dataclass(frozen=True)
class HeuristicConfig:
    alpha: RealSource
    beta: RealSource
    epsilon: float | None = None  # in (0, 1/4) for U
    C: float | None = None  # > 0 for V
    T: int = 1000

    def __post_init__(self):
        if self.T < 1:
            raise InputValidationError("T must be >= 1")
        if self.epsilon is not None and not 0 < self.epsilon < 0.25:
            raise InputValidationError("epsilon must lie in (0, 1/4)")
        if self.C is not None and self.C <= 0:
            raise InputValidationError("C must be positive")


def _product_value(
    n: int, alpha: RealSource, beta: RealSource, ctx: RealCtx, logn: bool
):
    """Certified n ||n a|| ||n b|| (times log n when logn is set)."""
    prec = max(int(g.mpz(n).bit_length()) + 64, 128)

    def compute(pr):
        fa = n * alpha(pr)
        fa = fa - g.floor(fa + g.mpq(1, 2))
        fb = n * beta(pr)
        fb = fb - g.floor(fb + g.mpq(1, 2))
        v = n * abs(fa) * abs(fb)
        if logn:
            v = v * g.log(g.mpfr(n))
        return v

    return certify(compute, ctx, prec=prec)


def _count(threshold, alpha, beta, ctx, T, logn) -> int:
    thr = g.mpq(*float(threshold).as_integer_ratio())
    count = 0
    undecided = []
    for n in range(1, T + 1):
        v = _product_value(n, alpha, beta, ctx, logn)
        attempts = 0
        while True:
            if v.hi_exact() < thr:
                count += 1
                break
            if v.lo_exact() >= thr:
                break
            attempts += 1
            prec = max(v.value.precision, 128) * 2
            if prec > ctx.max_precision_bits or attempts > 16:
                undecided.append(n)
                break
            v = _product_value(n, alpha, beta, RealCtx(prec), logn)
    if undecided:
        raise AmbiguousRoundingError(
            f"products at n={undecided} sit on the threshold; "
            f"count is between {count} and {count + len(undecided)}",
            count_bounds=(count, count + len(undecided)),
        )
    return count


def count_U(cfg: HeuristicConfig, ctx: RealCtx | None = None) -> int:
    """|{n <= T : n ||n a|| ||n b|| < eps}| by direct evaluation."""
    if cfg.epsilon is None:
        raise InputValidationError("count_U needs epsilon")
    ctx = ctx or RealCtx(128)
    return _count(cfg.epsilon, cfg.alpha, cfg.beta, ctx, cfg.T, False)


def count_V(cfg: HeuristicConfig, ctx: RealCtx | None = None) -> int:
    """|{n <= T : n log(n) ||n a|| ||n b|| < C}| by direct evaluation."""
    if cfg.C is None:
        raise InputValidationError("count_V needs C")
    ctx = ctx or RealCtx(128)
    return _count(cfg.C, cfg.alpha, cfg.beta, ctx, cfg.T, True)


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------


def m_C(C) -> int:
    """First integer m with m*log(m) >= 4C (1*log(1) = 0 never qualifies)."""
    if C <= 0:
        raise InputValidationError("C must be positive")
    c4 = 4 * g.mpfr(C, precision=128)
    m = 2
    while True:
        with wctx(128):
            lo = m * g.log(g.mpfr(m)) - c4
        if abs(lo) < g.exp2(-64):
            with wctx(512):
                lo = m * g.log(g.mpfr(m)) - 4 * g.mpfr(C, precision=512)
        if lo >= 0:
            return m
        m += 1


def estimate_F(epsilon, T) -> float:
    """2 eps log(T)^2 + 4 eps (1 - log 4 eps) log(T)."""
    if not 0 < epsilon < 0.25:
        raise InputValidationError("epsilon must lie in (0, 1/4)")
    if T < 1:
        raise InputValidationError("T must be >= 1")
    with wctx(128):
        eps = g.mpfr(epsilon)
        lt = g.log(g.mpfr(T))
        return float(2 * eps * lt * lt + 4 * eps * (1 - g.log(4 * eps)) * lt)


def _S(C, x):
    lx = g.log(g.mpfr(x))
    llx = g.log(lx)
    return 4 * C * lx + 2 * C * llx * llx + 4 * C * (1 - g.log(4 * C)) * llx


def estimate_G(C, T) -> float:
    """S_C(T) - S_C(m_C) + (m_C - 1) for T >= m_C."""
    mc = m_C(C)
    if T < mc:
        raise InputValidationError(f"T must be >= m_C = {mc}")
    with wctx(128):
        c = g.mpfr(C)
        return float(_S(c, T) - _S(c, mc) + (mc - 1))


def quadrature_F(epsilon, T, steps: int = 200_000) -> float:
    """Independent oracle for estimate_F: composite Simpson quadrature of
    the derivation's integrand int_1^T (4 eps/x)(1 - log(4 eps/x)) dx,
    taken in u = log x where the integrand is quadratic (so Simpson is
    exact up to rounding; steps only guards the implementation)."""
    with wctx(192):
        eps = g.mpfr(epsilon)
        top = g.log(g.mpfr(T))

        def f(u):
            return 4 * eps * (1 - g.log(4 * eps) + u)

        n = steps if steps % 2 == 0 else steps + 1
        h = top / n
        acc = f(g.mpfr(0)) + f(top)
        for i in range(1, n):
            acc += f(i * h) * (4 if i % 2 else 2)
        return float(acc * h / 3)


def series(
    cfg: HeuristicConfig,
    mode: str,
    stride: int,
    ctx: RealCtx | None = None,
):
    """Rows (T, count, estimate) for T = stride, 2*stride, ..., cfg.T."""
    if mode not in ("U", "V"):
        raise InputValidationError("mode must be 'U' or 'V'")
    ctx = ctx or RealCtx(128)
    if mode == "U":
        threshold, logn = cfg.epsilon, False
        if threshold is None:
            raise InputValidationError("mode U needs epsilon")
    else:
        threshold, logn = cfg.C, True
        if threshold is None:
            raise InputValidationError("mode V needs C")
    thr = g.mpq(*float(threshold).as_integer_ratio())
    mc = m_C(cfg.C) if mode == "V" else None
    count = 0
    rows = []
    for n in range(1, cfg.T + 1):
        v = _product_value(n, cfg.alpha, cfg.beta, ctx, logn)
        if v.hi_exact() < thr:
            count += 1
        elif v.lo_exact() < thr:
            raise AmbiguousRoundingError(f"product at n={n} sits on threshold")
        if n % stride == 0 or n == cfg.T:
            if mode == "U":
                est = estimate_F(cfg.epsilon, n)
            else:
                est = estimate_G(cfg.C, n) if n >= mc else float(n)
            rows.append((n, count, est))
    return rows
