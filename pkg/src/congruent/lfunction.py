"""L-series of y^2 = x^3 - x and its quadratic twists."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .classgroup import four_rank_defect
from .ntheory import is_prime, is_squarefree, jacobi, quartic_residue_of_two, sqrt_mod

# sign fixed by comparing with point counts for p <= 200 (see tests)
_CAL_SIGN = 1


def _two_squares(p: int) -> tuple[int, int]:
    """a^2 + b^2 = p with a odd, for p = 1 mod 4 (Cornacchia)."""
    r = sqrt_mod(p - 1, p, 1)
    a, b = p, r
    limit = math.isqrt(p)
    while b > limit:
        a, b = b, a % b
    x = b
    y = math.isqrt(p - x * x)
    if x % 2 == 0:
        x, y = y, x
    return x, y


def hecke_ap(p: int) -> int:
    if p == 2 or p % 4 == 3:
        return 0
    a, b = _two_squares(p)
    for x in (a, -a):
        for y in (b, -b):
            u, v = x - 1, y
            if (u + v) % 4 == 0 and (v - u) % 4 == 0:
                return _CAL_SIGN * 2 * x
    raise ArithmeticError("no primary associate found")


def point_count_ap(p: int) -> int:
    """p + 1 - #E(F_p) for y^2 = x^3 - x, by counting."""
    if p == 2:
        return 0
    count = 1
    for x in range(p):
        count += 1 + jacobi(x * x * x - x, p)
    return p + 1 - count


@dataclass
class CoefficientTable:
    d: int
    a: np.ndarray  # a[0] unused

    @property
    def N(self) -> int:
        return len(self.a) - 1


_BASE: np.ndarray | None = None


def _smallest_prime_factors(N: int) -> np.ndarray:
    spf = np.zeros(N + 1, dtype=np.int64)
    for p in range(2, math.isqrt(N) + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
            spf[p * p :: p] = block
    idx = np.arange(N + 1)
    mask = spf == 0
    spf[mask] = idx[mask]
    return spf


def hecke_coefficients(N: int) -> CoefficientTable:
    global _BASE
    if _BASE is not None and len(_BASE) > N:
        return CoefficientTable(1, _BASE[: N + 1].copy())
    N = max(N, 1000)
    spf = _smallest_prime_factors(N)
    a = np.zeros(N + 1, dtype=object)
    a[1] = 1
    for n in range(2, N + 1):
        p = int(spf[n])
        m, k = n, 0
        while m % p == 0:
            m //= p
            k += 1
        if m > 1:
            a[n] = a[p**k] * a[m]
            continue
        # prime power p^k
        if k == 1:
            a[n] = hecke_ap(p)
        else:
            ap = a[p]
            a[n] = ap * a[n // p] - (p * a[n // (p * p)] if p != 2 else 0)
    _BASE = a
    return CoefficientTable(1, a.copy())


def twist_coefficients(d: int, N: int) -> CoefficientTable:
    if d == 0 or not is_squarefree(abs(d)):
        raise ValueError("twist index must be squarefree")
    base = hecke_coefficients(N).a[: N + 1]
    if d == 1:
        return CoefficientTable(1, base.copy())
    out = np.zeros(N + 1, dtype=object)
    for n in range(1, N + 1, 2):
        if base[n] == 0:
            continue
        out[n] = base[n] * jacobi(d, n)
    return CoefficientTable(d, out)


def root_number(m: int) -> int:
    if m < 1 or not is_squarefree(m):
        raise ValueError("m must be positive and squarefree")
    return -1 if m % 8 in (5, 6, 7) else 1


def conductor(d: int) -> int:
    d = abs(d)
    if d % 2:
        return 32 * d * d
    return 64 * (d // 2) ** 2


def _terms_needed(N: int, digits: int, t: float = 1.0) -> int:
    rate = 2 * math.pi * min(t, 1 / t) / math.sqrt(N)
    return int((digits + 3) * math.log(10) / rate) + 10


def _series(d: int, digits: int, t, kernel):
    N = conductor(d)
    sign = root_number(abs(d))
    count = _terms_needed(N, digits, float(t))
    a = twist_coefficients(d, count).a
    sq = math.sqrt(N) if digits <= 15 else mpmath.sqrt(N)
    return kernel(a, count, sq, sign, t)


def _value_kernel_fast(a, count, sq, sign, t):
    idx = np.nonzero(np.array([x != 0 for x in a[1 : count + 1]]))[0] + 1
    coeffs = np.array([float(a[i]) for i in idx])
    n = idx.astype(float)
    x = 2 * np.pi * n / sq
    terms = coeffs / n * (np.exp(-x * t) + sign * np.exp(-x / t))
    return float(np.sum(terms))


def _value_kernel_mp(a, count, sq, sign, t):
    total = mpmath.mpf(0)
    c = 2 * mpmath.pi / sq
    t = mpmath.mpf(t)
    for n in range(1, count + 1):
        an = a[n]
        if an:
            x = c * n
            total += mpmath.mpf(int(an)) / n * (mpmath.exp(-x * t) + sign * mpmath.exp(-x / t))
    return total


def central_value(d: int, digits: int = 30, t=1):
    """L(E^(d), 1); digits <= 15 uses a float64 sum."""
    if root_number(abs(d)) == -1:
        return mpmath.mpf(0) if digits > 15 else 0.0
    if digits <= 15:
        return _series(d, digits, t, _value_kernel_fast)
    with mpmath.workdps(digits + 10):
        return +_series(d, digits, t, _value_kernel_mp)


def central_derivative(d: int, digits: int = 30):
    if root_number(abs(d)) != -1:
        raise ValueError("derivative requested for a twist with root number +1")
    N = conductor(d)
    with mpmath.workdps(digits + 10):
        count = _terms_needed(N, digits)
        a = twist_coefficients(d, count).a
        c = 2 * mpmath.pi / mpmath.sqrt(N)
        total = mpmath.mpf(0)
        for n in range(1, count + 1):
            if a[n]:
                total += mpmath.mpf(int(a[n])) / n * mpmath.e1(c * n)
        return +(2 * total)


def real_period(d: int = 1, digits: int = 30):
    if d < 1 or not is_squarefree(d):
        raise ValueError("d must be a positive squarefree integer")
    with mpmath.workdps(digits + 10):
        return +(2 * mpmath.pi / mpmath.agm(mpmath.sqrt(2), 1) / mpmath.sqrt(d))


@dataclass
class AlgebraicLValue:
    d: int
    value: object
    period: object
    algebraic_part: Fraction | None
    two_adic_valuation: float | int
    zero: bool
    warning: str = ""


def _v2(q: Fraction) -> int:
    v = 0
    num, den = q.numerator, q.denominator
    while num % 2 == 0:
        num //= 2
        v += 1
    while den % 2 == 0:
        den //= 2
        v -= 1
    return v


def algebraic_part(d: int, digits: int = 30) -> AlgebraicLValue:
    value = central_value(d, digits)
    period = real_period(d, max(digits, 20))
    ratio = value / float(period) if digits <= 15 else value / period
    zero_tol = 10.0 ** (-digits / 2)
    if abs(ratio) < zero_tol:
        return AlgebraicLValue(d, value, period, Fraction(0), math.inf, True)
    warning = ""
    for den in (2**6, 2**10):
        num = int(mpmath.nint(ratio * den))
        q = Fraction(num, den)
        if abs(ratio - (float(q) if digits <= 15 else mpmath.mpf(q.numerator) / q.denominator)) < zero_tol:
            return AlgebraicLValue(d, value, period, q, _v2(q), False, warning)
        warning = "denominator widened to 2^10"
    raise ArithmeticError(f"L-value ratio for d={d} is not a rational with 2-power denominator <= 2^10")


def quartic_product(primes) -> int:
    prod = 1
    for p in primes:
        prod *= quartic_residue_of_two(p) * (-1) ** ((p - 1) // 8)
    return prod


def zhao_check(primes, digits: int = 15) -> dict:
    primes = sorted(primes)
    if not primes or any(p % 8 != 1 or not is_prime(p) for p in primes):
        raise ValueError("primes must all be 1 mod 8")
    s = len(primes)
    m = math.prod(primes)
    bound = 2 * s - 1
    out = {"primes": primes, "m": m, "bound": bound}
    for label, d in (("E2m", 2 * m), ("Em", m)):
        lv = algebraic_part(d, digits)
        out[label] = {
            "d": d,
            "algebraicPart": lv.algebraic_part,
            "v2": lv.two_adic_valuation,
            "boundHolds": lv.two_adic_valuation >= bound,
        }
    predicted = four_rank_defect(primes) == 1 and quartic_product(primes) == -1
    out["equalityPredicted"] = predicted
    out["equalityObserved"] = out["Em"]["v2"] == bound
    return out
