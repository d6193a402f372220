"""Exact arithmetic on E^(m): Y^2 = X^3 - m^2 X over Q.

Points are (X, Y) pairs of Fractions, None is the origin.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt

import mpmath
from mpmath import mp

from .ntheory import factor
from .weierstrass import Lattice


def rational_sqrt(q: Fraction) -> Fraction | None:
    q = Fraction(q)
    if q < 0:
        return None
    a, b = isqrt(q.numerator), isqrt(q.denominator)
    if a * a == q.numerator and b * b == q.denominator:
        return Fraction(a, b)
    return None


class TwistCurve:
    def __init__(self, m: int):
        if m < 1:
            raise ValueError("m must be positive")
        self.m = m
        self.a = -m * m

    def __repr__(self):
        return f"TwistCurve(Y^2 = X^3 - {self.m}^2 X)"

    def on_curve(self, P) -> bool:
        if P is None:
            return True
        X, Y = P
        return Y * Y == X**3 + self.a * X

    def two_torsion(self):
        m = Fraction(self.m)
        return [None, (Fraction(0), Fraction(0)), (m, Fraction(0)), (-m, Fraction(0))]

    def neg(self, P):
        return None if P is None else (P[0], -P[1])

    def add(self, P, Q):
        if P is None:
            return Q
        if Q is None:
            return P
        (x1, y1), (x2, y2) = P, Q
        if x1 == x2:
            if y1 + y2 == 0:
                return None
            lam = (3 * x1 * x1 + self.a) / (2 * y1)
        else:
            lam = (y2 - y1) / (x2 - x1)
        x3 = lam * lam - x1 - x2
        y3 = lam * (x1 - x3) - y1
        return (x3, y3)

    def mul(self, k: int, P):
        if k < 0:
            return self.mul(-k, self.neg(P))
        R, B = None, P
        while k:
            if k & 1:
                R = self.add(R, B)
            B = self.add(B, B)
            k >>= 1
        return R

    def halve(self, P) -> list:
        """All rational Q with 2Q = P."""
        if P is None:
            return list(self.two_torsion())
        x0, _ = P
        m = self.m
        roots = [rational_sqrt(x0 - e) for e in (0, m, -m)]
        if any(r is None for r in roots):
            return []
        out = []
        seen = set()
        for s1 in (1, -1):
            for s2 in (1, -1):
                for s3 in (1, -1):
                    r1, r2, r3 = s1 * roots[0], s2 * roots[1], s3 * roots[2]
                    x = x0 + r1 * r2 + r1 * r3 + r2 * r3
                    y = rational_sqrt(x**3 + self.a * x)
                    if y is None:
                        continue
                    for Q in ((x, y), (x, -y)):
                        if Q not in seen and self.add(Q, Q) == P:
                            seen.add(Q)
                            out.append(Q)
        return out

    def is_torsion(self, P) -> bool:
        # torsion of a congruent-number twist is exactly E[2]
        return P is None or P[1] == 0

    def naive_height(self, P) -> float:
        if P is None:
            return 0.0
        X = P[0]
        return float(mpmath.log(max(abs(X.numerator), X.denominator)))

    def good_multiple(self, P):
        """Smallest k in a short list with kP of nonsingular reduction at all p | 2m."""
        primes = sorted(factor(2 * self.m))
        for k in (1, 2, 3, 4, 6, 8, 12, 16, 24):
            Q = self.mul(k, P)
            if Q is None:
                continue
            if all(self._nonsingular_at(Q, p) for p in primes):
                return k, Q
        raise ArithmeticError("no small multiple with good reduction")

    def _nonsingular_at(self, Q, p: int) -> bool:
        X, Y = Q
        if X.denominator % p == 0:
            return True  # reduces to the origin
        # singular point of y^2 = x^3 + a x mod p (a = 0 mod p): both partials vanish
        fx = 3 * X * X + self.a
        fy = 2 * Y
        return not (_padic_zero(fx, p) and _padic_zero(fy, p))

    def canonical_height(self, P, digits: int = 40):
        """Canonical height (Silverman normalization)."""
        if self.is_torsion(P):
            return mpmath.mpf(0)
        k, Q = self.good_multiple(P)
        with mpmath.workdps(digits + 15):
            L = Lattice.for_curve(self.a)
            X, Y = Q
            z = L.elliptic_log(mpmath.mpf(X.numerator) / X.denominator, mpmath.mpf(Y.numerator) / Y.denominator)
            lam = L.archimedean_height(z)
            h = lam + mpmath.log(X.denominator) / 2
            return +(h / (k * k))


def _padic_zero(q: Fraction, p: int) -> bool:
    q = Fraction(q)
    return q.numerator % p == 0


def triangle_from_point(m: int, P):
    if P is None or P[1] == 0:
        raise ValueError("need a point of infinite order")
    X, Y = P
    m = Fraction(m)
    a = abs(X * X - m * m) / abs(Y)
    b = 2 * m * abs(X) / abs(Y)
    c = (X * X + m * m) / abs(Y)
    if a * a + b * b != c * c or a * b / 2 != m:
        raise ArithmeticError("triangle identities failed")
    return a, b, c


@dataclass
class DivisibilityCertificate:
    m: int
    point: tuple
    max_index: int
    chain: list = field(default_factory=list)  # chain[j] = Q_j with 2^j Q_j in point + E[2]
    fails_at: int | None = None

    def to_json(self):
        return {
            "maxIndex": self.max_index,
            "chain": [point_json(Q) for Q in self.chain],
            "failsAt": self.fails_at,
        }


def divisibility_index(curve: TwistCurve, P, max_j: int = 8) -> DivisibilityCertificate:
    if curve.is_torsion(P):
        raise ValueError("torsion input")
    T2 = curve.two_torsion()
    level = {curve.add(P, T) for T in T2}
    chain = [min(level, key=_ptkey)]
    j = 0
    while j < max_j:
        nxt = set()
        for R in level:
            for Q in curve.halve(R):
                for T in T2:
                    nxt.add(curve.add(Q, T))
        if not nxt:
            return DivisibilityCertificate(curve.m, P, j, chain, j + 1)
        level = nxt
        chain.append(min(level, key=lambda Q: (curve.naive_height(Q), _ptkey(Q))))
        j += 1
    return DivisibilityCertificate(curve.m, P, j, chain, None)


def _ptkey(Q):
    if Q is None:
        return (0, 0, 0, 0)
    return (Q[0].denominator, Q[0].numerator, Q[1].denominator, Q[1].numerator)


def frac_json(q: Fraction) -> dict:
    q = Fraction(q)
    return {"num": str(q.numerator), "den": str(q.denominator)}


def point_json(P):
    if P is None:
        return None
    return {"X": frac_json(P[0]), "Y": frac_json(P[1])}


def point_from_json(d):
    if d is None:
        return None
    return (Fraction(int(d["X"]["num"]), int(d["X"]["den"])), Fraction(int(d["Y"]["num"]), int(d["Y"]["den"])))


# --- points of E: y^2 = x^3 - x over Q(sqrt D) ------------------------------------------


@dataclass(frozen=True)
class QuadElt:
    """a + b sqrt(D) with a, b rational and D a squarefree integer != 1."""

    a: Fraction
    b: Fraction
    D: int

    @classmethod
    def rational(cls, q, D: int) -> "QuadElt":
        return cls(Fraction(q), Fraction(0), D)

    def __add__(self, o):
        o = self._coerce(o)
        return QuadElt(self.a + o.a, self.b + o.b, self.D)

    def __radd__(self, o):
        return self + o

    def __neg__(self):
        return QuadElt(-self.a, -self.b, self.D)

    def __sub__(self, o):
        return self + (-self._coerce(o))

    def __rsub__(self, o):
        return self._coerce(o) - self

    def __mul__(self, o):
        o = self._coerce(o)
        return QuadElt(self.a * o.a + self.D * self.b * o.b, self.a * o.b + self.b * o.a, self.D)

    def __rmul__(self, o):
        return self * o

    def conj(self) -> "QuadElt":
        return QuadElt(self.a, -self.b, self.D)

    def norm(self) -> Fraction:
        return self.a * self.a - self.D * self.b * self.b

    def __truediv__(self, o):
        o = self._coerce(o)
        nrm = o.norm()
        if nrm == 0:
            raise ZeroDivisionError("division by zero in quadratic field")
        num = self * o.conj()
        return QuadElt(num.a / nrm, num.b / nrm, self.D)

    def __rtruediv__(self, o):
        return self._coerce(o) / self

    def __pow__(self, e: int):
        out = QuadElt.rational(1, self.D)
        for _ in range(e):
            out = out * self
        return out

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def _coerce(self, o):
        if isinstance(o, QuadElt):
            if o.D != self.D:
                raise ValueError("field mismatch")
            return o
        return QuadElt.rational(o, self.D)

    def sqrt(self) -> "QuadElt | None":
        if self.is_zero():
            return self
        if self.b == 0:
            r = rational_sqrt(self.a)
            if r is not None:
                return QuadElt(r, Fraction(0), self.D)
            r = rational_sqrt(self.a / self.D)
            if r is not None:
                return QuadElt(Fraction(0), r, self.D)
            return None
        # (u + v sqrt D)^2 = a + b sqrt D: u^2 + D v^2 = a and 2uv = b
        r = rational_sqrt(self.norm())
        if r is None:
            return None
        for s in (r, -r):
            u = rational_sqrt((self.a + s) / 2)
            if u:
                cand = QuadElt(u, self.b / (2 * u), self.D)
                if cand * cand == self:
                    return cand
        return None

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        return f"{self.a} + {self.b}*sqrt({self.D})"


class CurveOverQuadratic:
    """E: y^2 = x^3 - x over Q(sqrt D); points are (x, y) QuadElt pairs or None."""

    def __init__(self, D: int):
        self.D = D

    def elt(self, a, b=0) -> QuadElt:
        return QuadElt(Fraction(a), Fraction(b), self.D)

    def on_curve(self, P) -> bool:
        if P is None:
            return True
        x, y = P
        return (y * y - x**3 + x).is_zero()

    def add(self, P, Q):
        if P is None:
            return Q
        if Q is None:
            return P
        (x1, y1), (x2, y2) = P, Q
        if x1 == x2:
            if (y1 + y2).is_zero():
                return None
            lam = (3 * x1 * x1 - 1) / (2 * y1)
        else:
            lam = (y2 - y1) / (x2 - x1)
        x3 = lam * lam - x1 - x2
        return (x3, lam * (x1 - x3) - y1)

    def neg(self, P):
        return None if P is None else (P[0], -P[1])

    def two_torsion(self):
        z, one = self.elt(0), self.elt(1)
        return [None, (z, z), (one, z), (-one, z)]

    def halve(self, P) -> list:
        """All Q over the field with 2Q = P."""
        if P is None:
            return self.two_torsion()
        x0 = P[0]
        roots = [(x0 - e).sqrt() for e in (0, 1, -1)]
        if any(r is None for r in roots):
            return []
        out = []
        for s1 in (1, -1):
            for s2 in (1, -1):
                for s3 in (1, -1):
                    r1, r2, r3 = s1 * roots[0], s2 * roots[1], s3 * roots[2]
                    x = x0 + r1 * r2 + r1 * r3 + r2 * r3
                    y = (x**3 - x).sqrt()
                    if y is None:
                        continue
                    for Q in ((x, y), (x, -y)):
                        if Q not in out and self.add(Q, Q) == P:
                            out.append(Q)
        return out


@dataclass(frozen=True)
class AlgebraicPoint:
    """A point of E(Q(sqrt m*))^-: x rational, y = s sqrt(m*) with s rational."""

    m_star: int
    x: Fraction
    s: Fraction

    def field_point(self):
        C = CurveOverQuadratic(self.m_star)
        return (C.elt(self.x), C.elt(0, self.s))

    def check(self) -> bool:
        return self.m_star * self.s * self.s == self.x**3 - self.x

    def to_twist(self):
        """(X, Y) on Y^2 = X^3 - m^2 X."""
        ms = self.m_star
        return (ms * self.x, ms * ms * self.s)

    @classmethod
    def from_twist(cls, m_star: int, P) -> "AlgebraicPoint":
        X, Y = P
        return cls(m_star, Fraction(X) / m_star, Fraction(Y) / (m_star * m_star))

    def to_json(self):
        return {"mStar": self.m_star, "x": frac_json(self.x), "yOverSqrtMStar": frac_json(self.s)}
