"""Complex uniformization of X_0(32) = E': y^2 = x^3 + 4x and the map f to E: y^2 = x^3 - x.

Points are handled through elliptic logarithms.  u(tau) = sum a_n/n q^n is the
Abel-Jacobi integral from the cusp at infinity; a unit c puts c*u on the period
lattice of E' so that the cusp 0 lands on (2, 4).  The 2-isogeny
f0(x, y) = (y^2/4x^2, y(4 - x^2)/8x^2) with kernel {O, (0, 0)} then acts on logs as
multiplication by a constant kappa, also found numerically.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath
from mpmath import mpc, mpf

from .lfunction import hecke_coefficients
from .weierstrass import Lattice

I = mpc(0, 1)

# rational torsion of E' over Q(i) and the normalizer elements translating by it
CUSP_POINTS = {
    "(2,4)": (2, 4),
    "(2,-4)": (2, -4),
    "(0,0)": (0, 0),
    "(-2,4i)": (-2, 4j),
    "(-2,-4i)": (-2, -4j),
    "(2i,0)": (2j, 0),
    "(-2i,0)": (-2j, 0),
}
TRANSLATIONS = {
    "(2,4)": ((0, 1), (-32, -16)),
    "(2,-4)": ((-16, -1), (32, 0)),
    "(0,0)": ((-2, -1), (32, 14)),
    "(-2,4i)": ((-24, -7), (32, 8)),
    "(-2,-4i)": ((8, 7), (-32, -24)),
    "(2i,0)": ((-4, -3), (32, 20)),
    "(-2i,0)": ((4, 1), (32, 12)),
}


def mobius(M, tau):
    (a, b), (c, d) = M
    return (a * tau + b) / (c * tau + d)


def cusp_of(M) -> Fraction | None:
    """M applied to the cusp at infinity; None stands for infinity."""
    (a, _), (c, _) = M
    return None if c == 0 else Fraction(a, c)


def f0(pt):
    """The 2-isogeny E' -> E on coordinates."""
    if pt is None:
        return None
    x, y = pt
    if x == 0:
        return None
    return (y * y / (4 * x * x), y * (4 - x * x) / (8 * x * x))


class CalibrationError(ArithmeticError):
    pass


class Uniformization:
    """All analytic data at a fixed working precision (digits)."""

    def __init__(self, digits: int = 60):
        self.digits = digits
        self.dps = digits + 15
        with mpmath.workdps(self.dps):
            self._build()

    def _tol(self, loss: int = 10):
        return mpf(10) ** (-(self.digits - loss))

    # construction ----------------------------------------------------------

    def _build(self):
        # Im tau >= 1/8 after reduction, so |q| <= exp(-pi/4)
        count = int(self.dps * mpmath.log(10) / (mpmath.pi / 4)) + 20
        table = hecke_coefficients(count).a
        # a_n vanishes unless n = 1 mod 4; store c_j = a_{4j+1}/(4j+1)
        self._coef = [mpf(int(table[4 * j + 1])) / (4 * j + 1) for j in range(count // 4)]
        self.E = Lattice.for_curve(-1)
        self.Ep = Lattice.for_curve(4)
        self._fricke()
        self._calibrate_unit()
        self._calibrate_isogeny()

    def series(self, tau):
        """u(tau) by direct summation; only sensible for Im tau not too small."""
        q = mpmath.expjpi(2 * tau)
        q4 = q**4
        acc = mpc(0)
        for c in reversed(self._coef):
            acc = acc * q4 + c
        return acc * q

    def _fricke(self):
        W = lambda t: -1 / (32 * t)
        t1, t2, t3 = mpc(0.05, 0.2), mpc(-0.08, 0.19), mpc(0.02, 0.23)
        u1, u2, u3 = (self.series(t) for t in (t1, t2, t3))
        v1, v2, v3 = (self.series(W(t)) for t in (t1, t2, t3))
        eta = (v1 - v2) / (u1 - u2)
        e = int(mpmath.nint(eta.real))
        if e not in (1, -1) or abs(eta - e) > self._tol():
            raise CalibrationError(f"Fricke eigenvalue not +-1: {eta}")
        C = v1 - e * u1
        if abs(v3 - e * u3 - C) > self._tol():
            raise CalibrationError("Fricke constant is not consistent")
        self.eta = e
        self.C = C

    def raw(self, tau):
        """u(tau) for any tau in the upper half plane, via translations and the Fricke move."""
        tau = mpc(tau)
        if tau.imag <= 0:
            raise ValueError("tau must lie in the upper half plane")
        alpha, beta = mpc(1), mpc(0)
        # points on the circle |tau|^2 = 1/32 are swapped by W; leave them alone
        edge = (1 - mpf(10) ** (-self.dps // 2)) / 32
        for _ in range(10000):
            k = int(mpmath.nint(4 * tau.real))
            if k:
                tau = tau - mpf(k) / 4
                alpha *= I ** (k % 4)  # u(tau) = i^k u(tau - k/4)
            if abs(tau) ** 2 < edge:
                tau = -1 / (32 * tau)
                beta += alpha * self.C
                alpha *= self.eta
                continue
            return alpha * self.series(tau) + beta
        raise ArithmeticError("reduction did not terminate")

    def raw_cusp(self, r: Fraction | None):
        """u at a cusp, by the same reduction carried out on rationals."""
        if r is None:
            return mpc(0)
        r = Fraction(r)
        alpha, beta = mpc(1), mpc(0)
        while True:
            k = round(4 * r)
            if k:
                r -= Fraction(k, 4)
                alpha *= I ** (k % 4)
            if r == 0:
                return alpha * self.C + beta
            # a nonzero r with |4r| <= 1/2 has 4r = p/q with 2|p| < q (or 4r = 1/2),
            # and W sends it to -q/(2p): the denominator of 4r strictly drops
            r = Fraction(-1, 32) / r
            beta += alpha * self.C
            alpha *= self.eta

    def _calibrate_unit(self):
        target = (mpc(2), mpc(4))
        for c in (mpc(1), I, mpc(-1), -I):
            pt = self.Ep.point(c * self.C)
            if pt is not None and abs(pt[0] - target[0]) + abs(pt[1] - target[1]) < self._tol():
                self.unit = c
                return
        raise CalibrationError("no unit sends the cusp 0 to (2, 4)")

    def _calibrate_isogeny(self):
        z = mpc("0.3137", "0.1291")
        img = f0(self.Ep.point(z))
        for k in (2, -2, 2 * I, -2 * I):
            pt = self.E.point(k * z)
            if abs(pt[0] - img[0]) + abs(pt[1] - img[1]) < self._tol():
                self.kappa = k
                return
        raise CalibrationError("isogeny multiplier not found")

    # public evaluation -------------------------------------------------------

    def log_Eprime(self, tau):
        with mpmath.workdps(self.dps):
            return self.Ep.reduce(self.unit * self.raw(tau))

    def log_Eprime_cusp(self, r):
        with mpmath.workdps(self.dps):
            return self.Ep.reduce(self.unit * self.raw_cusp(r))

    def log_E(self, tau):
        """Elliptic log on E of f([tau])."""
        with mpmath.workdps(self.dps):
            return self.E.reduce(self.kappa * self.unit * self.raw(tau))

    def log_E_cusp(self, r):
        with mpmath.workdps(self.dps):
            return self.E.reduce(self.kappa * self.unit * self.raw_cusp(r))

    def uniformize(self, tau):
        """Point of E' attached to tau (None for the origin)."""
        with mpmath.workdps(self.dps):
            return self.Ep.point(self.log_Eprime(tau))

    def modular_param(self, tau):
        """f([tau]) on E."""
        with mpmath.workdps(self.dps):
            return self.E.point(self.log_E(tau))

    def cusp_point(self, r):
        with mpmath.workdps(self.dps):
            return self.Ep.point(self.log_Eprime_cusp(r))

    # self checks --------------------------------------------------------------

    def point_distance(self, p, q):
        if p is None or q is None:
            if p is None and q is None:
                return mpf(0)
            big = p if q is None else q
            return 1 / (1 + abs(big[0]))
        return abs(p[0] - q[0]) + abs(p[1] - q[1])

    def cusp_report(self) -> dict:
        """Image of each cusp M(infinity) against the torsion point it should be."""
        out = {}
        with mpmath.workdps(self.dps):
            out["infinity"] = {"point": None, "error": mpf(0)}
            for name, M in TRANSLATIONS.items():
                r = cusp_of(M)
                pt = self.cusp_point(r)
                want = tuple(mpc(v) for v in CUSP_POINTS[name])
                out[str(r)] = {"point": name, "error": self.point_distance(pt, want)}
        return out

    def translation_error(self, name: str, tau) -> mpf:
        """Distance between [M tau] and [tau] + P on E' for the listed pair (M, P)."""
        with mpmath.workdps(self.dps):
            M = TRANSLATIONS[name]
            shift = self.Ep.torsion_log(tuple(mpc(v) for v in CUSP_POINTS[name]), 4)
            lhs = self.log_Eprime(mobius(M, mpc(tau)))
            rhs = self.log_Eprime(tau) + shift
            return self.Ep.distance(lhs, rhs)

    def anchor_errors(self) -> dict:
        with mpmath.workdps(self.dps):
            zero = cusp_of(TRANSLATIONS["(2,4)"])
            r2i = cusp_of(TRANSLATIONS["(2i,0)"])
            p1 = self.E.point(self.log_E_cusp(zero))
            p2 = self.E.point(self.log_E_cusp(r2i))
            return {
                "f((2,4)) = (1,0)": self.point_distance(p1, (mpc(1), mpc(0))),
                "f((2i,0)) = (0,0)": self.point_distance(p2, (mpc(0), mpc(0))),
                "f(infinity) = O": mpf(0) if self.E.point(self.log_E_cusp(None)) is None else mpf(1),
            }


_CACHE: dict[int, Uniformization] = {}


def uniformization(digits: int = 60) -> Uniformization:
    if digits not in _CACHE:
        _CACHE[digits] = Uniformization(digits)
    return _CACHE[digits]
