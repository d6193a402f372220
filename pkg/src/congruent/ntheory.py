"""Elementary number theory used by every other module."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd, isqrt

# Deterministic for n < 3.3e24 (first 13 primes as witnesses).
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
MR_LIMIT = 3317044064679887385961981
TRIAL_DIVISION_CAP = 10**7


class InputError(ValueError):
    pass


def jacobi(a: int, b: int) -> int:
    if b <= 0 or b % 2 == 0:
        raise ValueError(f"jacobi needs odd positive modulus, got {b}")
    a %= b
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if b % 8 in (3, 5):
                result = -result
        a, b = b, a
        if a % 4 == 3 and b % 4 == 3:
            result = -result
        a %= b
    return result if b == 1 else 0


def kronecker(a: int, b: int) -> int:
    """Kronecker symbol (a/b) for any integer b."""
    if b == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if b < 0:
        b = -b
        if a < 0:
            result = -result
    while b % 2 == 0:
        b //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result
    if b == 1:
        return result
    return result * jacobi(a, b)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    if n >= MR_LIMIT:
        raise ValueError("primality test range exceeded")
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factor(n: int, cap: int = TRIAL_DIVISION_CAP) -> dict[int, int]:
    """Trial division; only meant for the small inputs of the scan path."""
    if n < 1:
        raise ValueError("factor needs a positive integer")
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    p = 5
    while p * p <= n:
        if p > cap:
            raise InputError("trial division cap exceeded")
        for q in (p, p + 2):
            while n % q == 0:
                out[q] = out.get(q, 0) + 1
                n //= q
        p += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_squarefree(n: int) -> bool:
    return n != 0 and all(e == 1 for e in factor(abs(n)).values())


def primes_up_to(bound: int) -> list[int]:
    if bound < 2:
        return []
    sieve = bytearray([1]) * (bound + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, isqrt(bound) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(range(p * p, bound + 1, p)))
    return [i for i, v in enumerate(sieve) if v]


def quartic_residue_of_two(p: int) -> int:
    if p % 8 != 1 or not is_prime(p):
        raise ValueError(f"{p} is not a prime congruent to 1 mod 8")
    r = pow(2, (p - 1) // 4, p)
    return 1 if r == 1 else -1


def _tonelli(a: int, p: int) -> int | None:
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, tt = 0, t
        while tt != 1:
            tt = tt * tt % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return r


def sqrt_mod(a: int, p: int, e: int = 1) -> int | None:
    """A square root of a modulo p**e for odd prime p, or None."""
    if p % 2 == 0 or e < 1:
        raise ValueError("sqrt_mod needs an odd prime and e >= 1")
    pe = p**e
    a %= pe
    if a == 0:
        return 0
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    if v % 2:
        return None
    # a = p^v * unit; the unit only matters mod p^(e - v)
    e1 = e - v
    r = _tonelli(a, p)
    if r is None:
        return None
    mod = p
    for _ in range(1, e1):
        mod *= p
        # Hensel: one more p-adic digit per step
        r = (r - (r * r - a) * pow(2 * r, -1, mod)) % mod
    r = (r * p ** (v // 2)) % pe
    return min(r, pe - r)


@dataclass(frozen=True)
class SquarefreeProduct:
    primes: tuple[int, ...]
    n: int
    k: int
    m: int | None
    m_star: int | None
    tian: bool
    notes: tuple[str, ...] = field(default=())

    @property
    def p0(self) -> int:
        return self.primes[0]


def validate_tian_input(primes, twist: int | None = None) -> SquarefreeProduct:
    """Validate a prime list; twist may force m = 2n instead of the default."""
    primes = [int(p) for p in primes]
    if not primes:
        raise InputError("empty prime list")
    if len(set(primes)) != len(primes):
        raise InputError("duplicate primes")
    for p in primes:
        if p == 2 or not is_prime(p):
            raise InputError(f"{p} is not an odd prime")
    odd = [p for p in primes if p % 8 != 1]
    tian = len(odd) == 1
    if tian:
        p0 = odd[0]
        rest = sorted(p for p in primes if p != p0)
    else:
        srt = sorted(primes)
        p0, rest = srt[0], srt[1:]
    ordered = (p0, *rest)
    n = 1
    for p in ordered:
        n *= p
    notes = []
    candidates = [c for c in (n, 2 * n) if c % 8 in (5, 6, 7)]
    if twist is not None:
        if twist not in (n, 2 * n):
            raise InputError("twist must be n or 2n")
        m = twist
    elif candidates:
        m = candidates[0]
    else:
        m = None
        notes.append("no m in {n, 2n} is 5, 6 or 7 mod 8")
    m_star = None if m is None else (m if n % 4 == 1 else -m)
    return SquarefreeProduct(ordered, n, len(ordered) - 1, m, m_star, tian, tuple(notes))


def parse_target(text: str) -> SquarefreeProduct:
    """Parse 'p0,p1,...' or a single squarefree integer (odd n or 2n)."""
    text = text.strip()
    if "," in text:
        return validate_tian_input([int(s) for s in text.split(",") if s.strip()])
    N = int(text)
    if N < 1 or not is_squarefree(N):
        raise InputError(f"{N} is not a positive squarefree integer")
    n = N // 2 if N % 2 == 0 else N
    if n == 1:
        return SquarefreeProduct((), 1, -1, N, N, False, ("n = 1 has no odd prime factor",))
    ctx = validate_tian_input(sorted(factor(n)), twist=N)
    return ctx


def crt_pair(r1: int, m1: int, r2: int, m2: int) -> int:
    g = gcd(m1, m2)
    if g != 1:
        raise ValueError("moduli not coprime")
    return (r1 + m1 * ((r2 - r1) * pow(m1, -1, m2) % m2)) % (m1 * m2)
