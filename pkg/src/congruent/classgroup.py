"""Class group of Q(sqrt(-2n)) as reduced binary quadratic forms of discriminant -8n.

Only the 2-part matters downstream: ambiguous classes, genus characters and the
dimension of A[2] intersected with 2A.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, isqrt

from . import gf2
from .ntheory import SquarefreeProduct, factor, is_squarefree, jacobi


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


@dataclass(frozen=True, order=True)
class QuadForm:
    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def __call__(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        if (abs(b) == a or a == c) and b < 0:
            return False
        return True

    def reduced(self) -> "QuadForm":
        a, b, c = self.a, self.b, self.c
        if a <= 0 or self.disc >= 0:
            raise ValueError("only positive definite forms")
        while True:
            # normalize b into (-a, a]
            if not (-a < b <= a):
                r = (a - b) // (2 * a)
                b, c = b + 2 * r * a, a * r * r + b * r + c
            if a > c:
                a, b, c = c, -b, a
                continue
            if a == c and b < 0:
                b = -b
            return QuadForm(a, b, c)

    def inverse(self) -> "QuadForm":
        return QuadForm(self.a, -self.b, self.c).reduced()

    def transform(self, m) -> "QuadForm":
        """Form f(px + qy, rx + sy) for m = ((p, q), (r, s))."""
        (p, q), (r, s) = m
        a, b, c = self.a, self.b, self.c
        return QuadForm(
            a * p * p + b * p * r + c * r * r,
            2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s,
            a * q * q + b * q * s + c * s * s,
        )


def principal_form(D: int) -> QuadForm:
    if D % 4 == 0:
        return QuadForm(1, 0, -D // 4)
    return QuadForm(1, 1, (1 - D) // 4)


def compose(f: QuadForm, g: QuadForm) -> QuadForm:
    """Dirichlet composition followed by reduction."""
    if f.disc != g.disc:
        raise ValueError("discriminant mismatch")
    a1, b1, c1 = f.a, f.b, f.c
    a2, b2, c2 = g.a, g.b, g.c
    if a1 > a2:
        a1, b1, c1, a2, b2, c2 = a2, b2, c2, a1, b1, c1
    s = (b1 + b2) // 2
    nn = b2 - s
    if a2 % a1 == 0:
        y1, d = 0, a1
    else:
        d, u, _ = _xgcd(a2, a1)
        y1 = u
    if s % d == 0:
        y2, x2, d1 = -1, 0, d
    else:
        d1, u, v = _xgcd(s, d)
        x2, y2 = u, -v
    v1, v2 = a1 // d1, a2 // d1
    r = (y1 * y2 * nn - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (c2 * d1 + r * (b2 + v2 * r)) // v1
    return QuadForm(a3, b3, c3).reduced()


def power(f: QuadForm, e: int) -> QuadForm:
    result = principal_form(f.disc)
    base = f
    while e:
        if e & 1:
            result = compose(result, base)
        base = compose(base, base)
        e >>= 1
    return result


def reduced_forms(D: int) -> list[QuadForm]:
    out = []
    amax = isqrt(-D // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            if (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if c < a or (a == c and b < 0):
                continue
            if gcd(gcd(a, b), c) != 1:
                continue
            out.append(QuadForm(a, b, c))
    return out


def ambiguous_reduced_count(n: int) -> int:
    """Number of reduced primitive forms of order <= 2 for discriminant -8n.

    Reduced ambiguous forms are exactly those with b = 0, b = a or a = c, so this is
    O(sqrt n) and independent of genus theory.
    """
    D = -8 * n
    count = 0
    amax = isqrt(-D // 3)
    for a in range(1, amax + 1):
        # b = 0
        if (-D) % (4 * a) == 0:
            c = -D // (4 * a)
            if c >= a and gcd(a, c) == 1:
                count += 1
        # b = a (b even here, so a even)
        if a % 2 == 0 and (a * a - D) % (4 * a) == 0:
            c = (a * a - D) // (4 * a)
            if c >= a and gcd(gcd(a, a), c) == 1 and not (a == c):
                count += 1
        # a = c, 0 < b < a
        t = 4 * a * a + D
        if t > 0:
            b = isqrt(t)
            if b * b == t and 0 < b < a and gcd(a, b) == 1:
                count += 1
    return count


@dataclass(frozen=True)
class ClassGroupSnapshot:
    n: int
    disc: int
    forms: tuple[QuadForm, ...]
    h: int
    two_torsion: dict  # d -> reduced form of the class of (d, 0, 2n/d)
    genus_table: dict  # p_i -> genus vector of the form (p_i, 0, 2n/p_i)


def _odd_primes(n: int) -> list[int]:
    return sorted(factor(n)) if n > 1 else []


def enumerate_reduced_forms(n: int) -> ClassGroupSnapshot:
    if n < 1 or n % 2 == 0 or not is_squarefree(n):
        raise ValueError(f"{n} is not an odd squarefree positive integer")
    D = -8 * n
    forms = tuple(reduced_forms(D))
    primes = _odd_primes(n)
    divisors = [1]
    for p in primes:
        divisors += [d * p for d in divisors]
    two = {d: QuadForm(d, 0, 2 * n // d).reduced() for d in sorted(divisors)}
    genus = {p: genus_character_vector(two[p], primes) for p in primes}
    return ClassGroupSnapshot(n, D, forms, len(forms), two, genus)


def represented_value(f: QuadForm, n: int, accept=None, bound: int = 20):
    """Smallest value f(x, y) with gcd(x, y) = 1, coprime to 2n and passing accept."""
    best = None
    for x in range(-bound, bound + 1):
        for y in range(0, bound + 1):
            if y == 0 and x != 1:
                continue
            if gcd(x, y) != 1:
                continue
            v = f(x, y)
            if gcd(v, 2 * n) != 1:
                continue
            if accept is not None and not accept(v):
                continue
            if best is None or v < best[0]:
                best = (v, x, y)
    if best is None:
        raise ArithmeticError(f"no suitable value represented by {f}")
    return best


def genus_character_vector(f: QuadForm, primes) -> int:
    """Bit j set iff the class of f moves sqrt(p_j*)."""
    if isinstance(primes, SquarefreeProduct):
        primes = primes.primes
    primes = list(primes)
    n = 1
    for p in primes:
        n *= p
    if f.disc != -8 * n:
        raise ValueError("form has the wrong discriminant")
    if not primes:
        return 0
    v = represented_value(f, n)[0]
    return sum(1 << j for j, p in enumerate(primes) if jacobi(v, p) == -1)


def sigma_pi_d_fixes_sqrt_pstar(d: int, p: int, n: int) -> bool:
    if n % d or n % p:
        raise ValueError("d and p must divide n")
    if d % p:
        return jacobi(d, p) == 1
    return jacobi(2 * n // d, p) == 1


def redei_rows(primes) -> list[int]:
    """Row i = genus vector of the ambiguous class attached to p_i (rule form)."""
    primes = list(primes)
    n = 1
    for p in primes:
        n *= p
    rows = []
    for p in primes:
        rows.append(
            sum(1 << j for j, q in enumerate(primes) if not sigma_pi_d_fixes_sqrt_pstar(p, q, n))
        )
    return rows


def four_rank_defect(ctx) -> int:
    """dim of A[2] meet 2A, from genus vectors of the ambiguous forms (p_i, 0, 2n/p_i)."""
    primes = list(ctx.primes if isinstance(ctx, SquarefreeProduct) else ctx)
    if not primes:
        return 0
    n = 1
    for p in primes:
        n *= p
    rows = [genus_character_vector(QuadForm(p, 0, 2 * n // p), primes) for p in primes]
    # the map d -> class is injective on divisors, so the dimension is the kernel size
    return len(primes) - gf2.rank(rows)


def condition11_holds(ctx) -> bool:
    primes = list(ctx.primes if isinstance(ctx, SquarefreeProduct) else ctx)
    n = 1
    for p in primes:
        n *= p
    want = 0 if n % 8 in (3, 5) else 1
    return four_rank_defect(primes) == want


def four_rank_direct(snap: ClassGroupSnapshot) -> int:
    """dim A[4]/A[2] by brute force on the enumerated group (small n only)."""
    e = principal_form(snap.disc)
    sq = {f: compose(f, f) for f in snap.forms}
    a2 = sum(1 for f in snap.forms if sq[f] == e)
    a4 = sum(1 for f in snap.forms if sq[f] in sq and sq[sq[f]] == e)
    return (a4 // a2).bit_length() - 1


@dataclass(frozen=True)
class IdealClassRep:
    """The ideal a Z + (b + w) Z of Z[w], w = sqrt(-2n); norm a is odd and prime to 2n."""

    a: int
    b: int
    n: int

    @property
    def norm_mod8(self) -> int:
        return self.a % 8

    def form(self) -> QuadForm:
        # a Z + (b + w) Z  <->  (a, -2b, c), matching form_to_ideal
        a, b, n = self.a, self.b, self.n
        return QuadForm(a, -2 * b, (b * b + 2 * n) // a)


def form_to_ideal(f: QuadForm, n: int, accept=None) -> IdealClassRep:
    """Ideal of odd norm prime to 2n in the class of f; accept filters the norm."""
    v, x, y = represented_value(f, n, accept, bound=40)
    g, s, r = _xgcd(x, y)  # s x + r y = 1 -> matrix ((x, -r), (y, s))
    h = f.transform(((x, -r), (y, s)))
    assert h.a == v and h.disc == f.disc
    b2 = h.b
    # form (a, B, C) <-> ideal a Z + ((-B + sqrt(D))/2) Z; sqrt(D)/2 = w
    rep = IdealClassRep(v, (-b2 // 2) % v, n)
    if (rep.b * rep.b + 2 * n) % v:
        raise ArithmeticError("ideal conversion failed")
    return rep


def ideal_class_form(rep: IdealClassRep) -> QuadForm:
    return QuadForm(rep.a, -2 * rep.b, (rep.b * rep.b + 2 * rep.n) // rep.a).reduced()
