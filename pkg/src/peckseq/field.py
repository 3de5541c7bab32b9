"""Exact arithmetic in K = Q(theta) for theta the unique real root of
x^3 - p*x - q, plus the general-cubic -> depressed-cubic transform and the
complex embeddings.

Elements are immutable triples of exact rationals in the power basis
1, theta, theta^2.  Multiplication reduces through theta^3 = p*theta + q;
norm, trace and inverse come from the matrix representation
x*I + y*T + z*T^2 with T the companion matrix of the cubic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import gmpy2 as g

from . import realctx
from .errors import (
    InputValidationError,
    ReducibleCubicError,
    ThreeRealRootsError,
)
from .realctx import CertifiedReal, RealCtx


def _mpq(v) -> "g.mpq":
    if isinstance(v, Fraction):
        return g.mpq(v.numerator, v.denominator)
    return g.mpq(v)


def discriminant(p: int, q: int) -> int:
    return 4 * p**3 - 27 * q**2


def _integer_root(p: int, q: int):
    """The integer root of x^3 - p*x - q if one exists, else None.

    Monic with integer coefficients, so any rational root is an integer;
    in the one-real-root case the only candidate is the integer nearest
    the real root.
    """
    lo, hi = realctx._isolating_bracket(p, q)
    mid = (lo + hi) / 2
    r = g.mpz((mid + g.mpq(1, 2)) // 1)
    if r**3 - p * r - q == 0:
        return int(r)
    return None


@dataclass(frozen=True)
class AffineMap:
    """theta = mult * alpha + shift, tying the source cubic's root alpha
    to the depressed cubic's root theta."""

    mult: int
    shift: int

    def theta_from_alpha(self, alpha):
        return self.mult * alpha + self.shift

    def alpha_from_theta(self, theta):
        return (theta - self.shift) / self.mult


@dataclass(frozen=True)
class CubicParams:
    """The depressed cubic x^3 - p*x - q, its provenance, and the
    denominator bound d with O_K contained in (1/d)Z[theta]."""

    p: int
    q: int
    A: int
    B: int
    C: int
    D: int
    d: int
    d_source: str  # "user_supplied" | "discriminant_default"

    def __post_init__(self):
        if self.d < 1:
            raise InputValidationError("d must be a positive integer")
        disc = discriminant(self.p, self.q)
        if disc >= 0:
            raise ThreeRealRootsError(
                f"4p^3 - 27q^2 = {disc} >= 0: not the one-real-root case"
            )
        r = _integer_root(self.p, self.q)
        if r is not None:
            raise ReducibleCubicError(f"x^3 - {self.p}x - {self.q} has root {r}")

    @classmethod
    def from_pq(cls, p: int, q: int, d: int | None = None) -> "CubicParams":
        """A directly-given depressed cubic (A=1, B=0, C=-p, D=-q)."""
        return cls(
            p=p,
            q=q,
            A=1,
            B=0,
            C=-p,
            D=-q,
            d=d if d is not None else abs(discriminant(p, q)),
            d_source="user_supplied" if d is not None else "discriminant_default",
        )

    # -- element constructors ------------------------------------------------

    def element(self, x, y=0, z=0) -> "FieldElement":
        return FieldElement(self, _mpq(x), _mpq(y), _mpq(z))

    def zero(self) -> "FieldElement":
        return self.element(0)

    def one(self) -> "FieldElement":
        return self.element(1)

    def theta(self) -> "FieldElement":
        return self.element(0, 1, 0)

    def theta2(self) -> "FieldElement":
        return self.element(0, 0, 1)

    def real_root(self, ctx: RealCtx) -> CertifiedReal:
        return realctx.real_root(self, ctx)


def depress(
    A: int, B: int, C: int, D: int, d: int | None = None
) -> tuple[CubicParams, AffineMap]:
    """Transform A*x^3 + B*x^2 + C*x + D (A > 0, content 1, irreducible,
    one real root) into the depressed monic form.

    General case: theta = 3*A*alpha + B with p = 3(B^2 - 3AC),
    q = -2B^3 + 9ABC - 27A^2*D.  When B = 0 the cheaper transform
    theta = A*alpha, p = -AC, q = -A^2*D applies.
    """
    if A <= 0:
        raise InputValidationError("leading coefficient A must be positive")
    if g.gcd(g.gcd(g.mpz(A), g.mpz(B)), g.gcd(g.mpz(C), g.mpz(D))) != 1:
        raise InputValidationError("gcd(A, B, C, D) must be 1")
    if B == 0:
        p = -A * C
        q = -(A**2) * D
        fmap = AffineMap(mult=A, shift=0)
    else:
        p = 3 * (B**2 - 3 * A * C)
        q = -2 * B**3 + 9 * A * B * C - 27 * A**2 * D
        fmap = AffineMap(mult=3 * A, shift=B)
    cp = CubicParams(
        p=p,
        q=q,
        A=A,
        B=B,
        C=C,
        D=D,
        d=d if d is not None else abs(discriminant(p, q)),
        d_source="user_supplied" if d is not None else "discriminant_default",
    )
    return cp, fmap


@dataclass(frozen=True)
class FieldElement:
    """x + y*theta + z*theta^2 with exact rational coordinates."""

    cp: CubicParams
    x: "g.mpq"
    y: "g.mpq"
    z: "g.mpq"

    def _check(self, other: "FieldElement"):
        if (self.cp.p, self.cp.q) != (other.cp.p, other.cp.q):
            raise InputValidationError("elements belong to different fields")

    def __add__(self, other):
        if isinstance(other, FieldElement):
            self._check(other)
            return FieldElement(
                self.cp, self.x + other.x, self.y + other.y, self.z + other.z
            )
        return FieldElement(self.cp, self.x + _mpq(other), self.y, self.z)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.cp, -self.x, -self.y, -self.z)

    def __sub__(self, other):
        return self + (-other if isinstance(other, FieldElement) else -_mpq(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, FieldElement):
            w = _mpq(other)
            return FieldElement(self.cp, self.x * w, self.y * w, self.z * w)
        self._check(other)
        p, q = g.mpq(self.cp.p), g.mpq(self.cp.q)
        x1, y1, z1 = self.x, self.y, self.z
        x2, y2, z2 = other.x, other.y, other.z
        w = y1 * z2 + z1 * y2  # theta^3 carry
        v = z1 * z2  # theta^4 carry
        return FieldElement(
            self.cp,
            x1 * x2 + q * w,
            x1 * y2 + y1 * x2 + p * w + q * v,
            x1 * z2 + y1 * y2 + z1 * x2 + p * v,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, FieldElement):
            return self * other.inv()
        return self * g.mpq(1) / _mpq(other)

    def __pow__(self, n: int) -> "FieldElement":
        """a^n by repeated squaring; negative n through the inverse."""
        if n < 0:
            return self.inv() ** (-n)
        result = self.cp.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0 and self.z == 0

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return (
                (self.cp.p, self.cp.q) == (other.cp.p, other.cp.q)
                and self.x == other.x
                and self.y == other.y
                and self.z == other.z
            )
        return self.y == 0 and self.z == 0 and self.x == _mpq(other)

    def __hash__(self):
        return hash((self.cp.p, self.cp.q, self.x, self.y, self.z))

    def coords(self):
        return (self.x, self.y, self.z)

    def matrix(self):
        """Matrix representation x*I + y*T + z*T^2 (row-major)."""
        p, q = self.cp.p, self.cp.q
        x, y, z = self.x, self.y, self.z
        return (
            (x, q * z, q * y),
            (y, x + p * z, p * y + q * z),
            (z, y, x + p * z),
        )

    def norm(self) -> "g.mpq":
        p, q = self.cp.p, self.cp.q
        x, y, z = self.x, self.y, self.z
        xpz = x + p * z
        pyqz = p * y + q * z
        return (
            x * xpz * xpz
            - x * y * pyqz
            - q * z * y * xpz
            + q * z * z * pyqz
            + q * y**3
            - q * y * z * xpz
        )

    def trace(self) -> "g.mpq":
        return 3 * self.x + 2 * self.cp.p * self.z

    def char_middle(self) -> "g.mpq":
        """Second elementary symmetric function of the conjugates (the
        coefficient of t in the characteristic polynomial, up to sign)."""
        p, q = self.cp.p, self.cp.q
        x, y, z = self.x, self.y, self.z
        return 3 * x * x + 4 * p * x * z + p * p * z * z - p * y * y - 3 * q * y * z

    def inv(self) -> "FieldElement":
        if self.is_zero():
            raise ZeroDivisionError("inverse of the zero element")
        p, q = self.cp.p, self.cp.q
        x, y, z = self.x, self.y, self.z
        det = self.norm()
        xpz = x + p * z
        pyqz = p * y + q * z
        return FieldElement(
            self.cp,
            (xpz * xpz - y * pyqz) / det,
            (z * pyqz - y * xpz) / det,
            (y * y - z * xpz) / det,
        )

    def real_value(self, ctx: RealCtx, prec: int | None = None) -> CertifiedReal:
        return realctx.certified_element(self, ctx, prec=prec)

    def __repr__(self):
        return f"({self.x}) + ({self.y})*th + ({self.z})*th^2"


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def pow_(a: FieldElement, n: int) -> FieldElement:
    return a**n


def norm(a: FieldElement) -> "g.mpq":
    return a.norm()


def trace(a: FieldElement) -> "g.mpq":
    return a.trace()


def inv(a: FieldElement) -> FieldElement:
    return a.inv()


@dataclass(frozen=True)
class EmbeddingTriple:
    """theta_1 real; theta_2, theta_3 the conjugate complex pair
    (-theta +- i*sqrt(3 theta^2 - 4p)) / 2, with theta_2 on the +i branch."""

    theta1: CertifiedReal
    theta2: tuple[CertifiedReal, CertifiedReal]  # (re, im)
    theta3: tuple[CertifiedReal, CertifiedReal]


def embeddings(cp: CubicParams, ctx: RealCtx) -> EmbeddingTriple:
    theta1 = realctx.real_root(cp, ctx)

    def parts(prec):
        th = realctx.cubic_root_raw(cp.p, cp.q, prec)
        re = -th / 2
        im = g.sqrt(3 * th * th - 4 * cp.p) / 2
        return re, im

    re, im = realctx.certify_many(parts, ctx)
    with realctx.wctx(im.value.precision):
        im_neg = -im.value
    return EmbeddingTriple(
        theta1=theta1,
        theta2=(re, im),
        theta3=(re, CertifiedReal(im_neg, im.radius)),
    )


def identity_check(e: FieldElement) -> tuple[FieldElement, FieldElement]:
    """Residuals of the two norm-factorization identities, recast as exact
    identities in K; both must be the zero element for every nonzero e.

    (2(x+pz) - y*th - z*th^2)^2 + (3 th^2 - 4p)(y - z*th)^2 = 4 N(e)/e
    (x+pz - y*th)^2 + (x+pz - z*th^2)^2
        + (1 - 2p/th^2)(y*th - z*th^2)^2 = 2 N(e)/e
    """
    if e.is_zero():
        raise ZeroDivisionError("identity check needs a nonzero element")
    cp = e.cp
    p = cp.p
    x, y, z = e.x, e.y, e.z
    n_over_e = e.inv() * e.norm()

    t1 = cp.element(2 * (x + p * z), -y, -z)
    t2 = cp.element(-4 * p, 0, 3)  # 3 theta^2 - 4p
    t3 = cp.element(y, -z, 0)  # y - z*theta
    res1 = t1 * t1 + t2 * (t3 * t3) - 4 * n_over_e

    u = cp.element(x + p * z, -y, 0)  # x + pz - y*theta
    v = cp.element(x + p * z, 0, -z)  # x + pz - z*theta^2
    w = cp.element(0, y, -z)  # y*theta - z*theta^2
    coe = cp.one() - cp.theta2().inv() * (2 * p)  # 1 - 2p/theta^2
    res2 = u * u + v * v + coe * (w * w) - 2 * n_over_e

    return res1, res2
