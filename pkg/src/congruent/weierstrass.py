"""Period lattices and Weierstrass functions for curves y^2 = x^3 + a x.

Points are (x, y) tuples of mpc with y = wp'(z)/2, or None for the origin.
Working precision is whatever mpmath.mp is set to by the caller.
"""

from __future__ import annotations

import mpmath
from mpmath import mp, mpc, mpf


def lemniscate_omega():
    """Real period of dx/(2y) on y^2 = x^3 - x (about 2.622)."""
    return mp.pi / mpmath.agm(mpmath.sqrt(2), 1)


class Lattice:
    def __init__(self, a, w1, w2):
        self.a = a
        self.w1 = mpc(w1)
        self.w2 = mpc(w2)
        if (self.w2 / self.w1).imag <= 0:
            raise ValueError("basis must be positively oriented")

    @classmethod
    def for_curve(cls, a: int) -> "Lattice":
        """Lattice of y^2 = x^3 + a x for a = -m^2 (m > 0) or a = 4."""
        om = lemniscate_omega()
        if a == 4:
            w1 = (1 + mpc(0, 1)) / 2 * om
        elif a < 0:
            # Y^2 = X^3 - m^2 X is y^2 = x^3 - x scaled by X = m x
            w1 = mpc(om / mpmath.sqrt(mpmath.sqrt(-a)))
        else:
            raise ValueError("unsupported curve")
        return cls(a, w1, mpc(0, 1) * w1)

    @property
    def tau(self):
        return self.w2 / self.w1

    def coords(self, z):
        """Real (s, t) with z = s w1 + t w2."""
        a11, a12 = self.w1.real, self.w2.real
        a21, a22 = self.w1.imag, self.w2.imag
        det = a11 * a22 - a12 * a21
        s = (z.real * a22 - a12 * z.imag) / det
        t = (a11 * z.imag - a21 * z.real) / det
        return s, t

    def reduce(self, z):
        z = mpc(z)
        s, t = self.coords(z)
        return z - mpmath.nint(s) * self.w1 - mpmath.nint(t) * self.w2

    def distance(self, z1, z2):
        """Distance between z1 and z2 modulo the lattice."""
        d = self.reduce(mpc(z1) - mpc(z2))
        best = abs(d)
        for i in (-1, 0, 1):
            for j in (-1, 0, 1):
                best = min(best, abs(d + i * self.w1 + j * self.w2))
        return best

    def _series(self, z):
        z = self.reduce(z)
        if abs(z) < mpf(10) ** (-mp.dps + 5):
            return None, None, z
        twopii = 2j * mp.pi
        u = mpmath.exp(twopii * z / self.w1)
        q = mpmath.exp(twopii * self.tau)
        ui = 1 / u
        S = u / (1 - u) ** 2
        D = u * (1 + u) / (1 - u) ** 3
        eps = mpf(10) ** (-mp.dps - 5)
        qn = q
        while abs(qn) > eps:
            a1 = qn * u
            a2 = qn * ui
            S += a1 / (1 - a1) ** 2 + a2 / (1 - a2) ** 2 - 2 * qn / (1 - qn) ** 2
            D += a1 * (1 + a1) / (1 - a1) ** 3 - a2 * (1 + a2) / (1 - a2) ** 3
            qn *= q
        c = twopii / self.w1
        return c * c * (mpf(1) / 12 + S), c**3 * D, z

    def wp(self, z):
        return self._series(z)[0]

    def point(self, z):
        x, dx, _ = self._series(z)
        if x is None:
            return None
        return (x, dx / 2)

    def residual(self, pt):
        if pt is None:
            return mpf(0)
        x, y = pt
        return abs(y * y - x**3 - self.a * x) / max(1, abs(x) ** 3)

    def half_periods(self):
        return [mpc(0), self.w1 / 2, self.w2 / 2, (self.w1 + self.w2) / 2]

    def torsion_log(self, pt, N: int):
        """z = (i w1 + j w2)/N with point(z) = pt, searched over the N-torsion."""
        best = None
        for i in range(N):
            for j in range(N):
                z = (i * self.w1 + j * self.w2) / N
                p = self.point(z)
                if pt is None or p is None:
                    if pt is None and p is None:
                        return z
                    continue
                d = abs(p[0] - pt[0]) + abs(p[1] - pt[1])
                if best is None or d < best[0]:
                    best = (d, z)
        if best is None or best[0] > mpf(10) ** (-mp.dps // 2):
            raise ArithmeticError("point is not N-torsion")
        return best[1]

    def elliptic_log(self, x, y):
        """z with point(z) = (x, y), by Newton iteration from a grid start."""
        x, y = mpc(x), mpc(y)
        if abs(x) > 100:
            z = 1 / mpmath.sqrt(x)
        else:
            best = None
            for i in range(12):
                for j in range(12):
                    zz = ((i + mpf(0.5)) * self.w1 + (j + mpf(0.5)) * self.w2) / 12
                    d = abs(self.wp(zz) - x)
                    if best is None or d < best[0]:
                        best = (d, zz)
            z = best[1]
        for _ in range(200):
            val, der, _ = self._series(z)
            step = (val - x) / der
            z -= step
            if abs(step) < mpf(10) ** (-mp.dps + 3):
                break
        pt = self.point(z)
        if abs(pt[1] + y) < abs(pt[1] - y):
            z = -z
        return self.reduce(z)

    # heights -----------------------------------------------------------

    def _theta_data(self):
        nome = mpmath.exp(1j * mp.pi * self.tau)
        t1 = mpmath.jtheta(1, 0, nome, 1)
        t3 = mpmath.jtheta(1, 0, nome, 3)
        eta_half = -(mp.pi**2) * t3 / (6 * self.w1 * t1)  # = zeta(w1/2)
        eta1 = 2 * eta_half
        eta2 = (eta1 * self.w2 - 2j * mp.pi) / self.w1
        return nome, t1, eta_half, eta1, eta2

    def sigma(self, z):
        nome, t1, eta_half, _, _ = self._theta_data()
        v = mp.pi * z / self.w1
        return self.w1 / mp.pi * mpmath.exp(eta_half * z * z / self.w1) * mpmath.jtheta(1, v, nome) / t1

    def archimedean_height(self, z):
        """-log|exp(-z eta(z)/2) sigma(z)|; lattice-periodic."""
        z = self.reduce(z)
        _, _, _, eta1, eta2 = self._theta_data()
        s, t = self.coords(z)
        eta_z = s * eta1 + t * eta2
        return -mpmath.log(abs(mpmath.exp(-z * eta_z / 2) * self.sigma(z)))
