import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from congruent.ntheory import (
    InputError,
    crt_pair,
    factor,
    is_prime,
    is_squarefree,
    jacobi,
    kronecker,
    parse_target,
    primes_up_to,
    quartic_residue_of_two,
    sqrt_mod,
    validate_tian_input,
)
from oracles import legendre_euler

SMALL_PRIMES = [p for p in range(3, 400) if all(p % q for q in range(2, int(p**0.5) + 1))]
odd_primes = st.sampled_from(SMALL_PRIMES)


@pytest.mark.parametrize("a,b,want", [(1, 7, 1), (5, 17, -1), (2, 7, 1), (0, 9, 0), (-1, 3, -1)])
def test_jacobi_examples(a, b, want):
    assert jacobi(a, b) == want


@pytest.mark.parametrize("b", [0, -3, 4])
def test_jacobi_rejects_bad_modulus(b):
    with pytest.raises(ValueError):
        jacobi(3, b)


def test_jacobi_matches_euler_criterion():
    for p in SMALL_PRIMES[:40]:
        for a in range(-20, 40):
            assert jacobi(a, p) == legendre_euler(a, p)


@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6), st.integers(0, 5000))
def test_jacobi_multiplicative_in_top(a, a2, b):
    b = 2 * b + 1
    assert jacobi(a, b) * jacobi(a2, b) == jacobi(a * a2, b)


@given(odd_primes, odd_primes)
def test_quadratic_reciprocity(p, q):
    if p == q:
        return
    assert jacobi(p, q) * jacobi(q, p) == (-1) ** ((p - 1) // 2 * (q - 1) // 2)


def test_kronecker_at_two():
    assert [kronecker(a, 2) for a in (1, 3, 5, 7, 4)] == [1, -1, -1, 1, 0]


@pytest.mark.parametrize("p,want", [(17, -1), (73, 1), (41, -1)])
def test_quartic_residue_of_two(p, want):
    assert quartic_residue_of_two(p) == want


def test_quartic_residue_properties():
    for p in primes_up_to(3000):
        if p % 8 != 1:
            continue
        r = quartic_residue_of_two(p)
        assert r * r == 1
        assert pow(2, (p - 1) // 4, p) == r % p


def test_quartic_residue_rejects_wrong_class():
    with pytest.raises(ValueError):
        quartic_residue_of_two(13)


def test_sqrt_mod_examples():
    assert sqrt_mod(4, 5, 1) in (2, 3)
    r = sqrt_mod(2, 7, 2)
    assert r is not None and (r * r - 2) % 49 == 0
    assert sqrt_mod(3, 5, 1) is None


@given(odd_primes, st.integers(1, 4), st.integers(0, 10**6))
def test_sqrt_mod_squares_back(p, e, x):
    a = x * x
    r = sqrt_mod(a, p, e)
    assert r is not None
    assert (r * r - a) % p**e == 0


@given(odd_primes, st.integers(1, 3), st.integers(0, 10**5))
def test_sqrt_mod_none_only_for_nonsquares(p, e, a):
    r = sqrt_mod(a, p, e)
    pe = p**e
    if r is None:
        assert all((y * y - a) % pe for y in range(pe))
    else:
        assert (r * r - a) % pe == 0


def test_is_prime_against_sieve():
    sieve = set(primes_up_to(20000))
    assert all(is_prime(k) == (k in sieve) for k in range(-5, 20000))
    assert is_prime(2**61 - 1)
    assert not is_prime(3215031751)  # strong pseudoprime to bases 2, 3, 5, 7


@given(st.integers(2, 10**7))
def test_factor_roundtrip(n):
    f = factor(n)
    prod = 1
    for p, e in f.items():
        assert is_prime(p)
        prod *= p**e
    assert prod == n
    assert is_squarefree(n) == all(e == 1 for e in f.values())


def test_crt_pair():
    x = crt_pair(2, 3, 3, 5)
    assert x % 3 == 2 and x % 5 == 3
    with pytest.raises(ValueError):
        crt_pair(1, 4, 1, 6)


def test_validate_examples():
    c = validate_tian_input([5])
    assert (c.n, c.m, c.m_star, c.k, c.tian) == (5, 5, 5, 0, True)
    c = validate_tian_input([3])
    assert (c.n, c.m, c.m_star) == (3, 6, -6)
    c = validate_tian_input([17, 5])
    assert c.primes == (5, 17) and (c.n, c.m, c.m_star) == (85, 85, 85)


def test_validate_orders_primes_with_p0_first():
    c = validate_tian_input([41, 17, 7])
    assert c.primes == (7, 17, 41)
    assert c.m == 7 * 17 * 41 and c.m_star == -c.m


def test_validate_errors_and_flags():
    with pytest.raises(InputError):
        validate_tian_input([5, 5])
    with pytest.raises(InputError):
        validate_tian_input([15])
    with pytest.raises(InputError):
        validate_tian_input([])
    assert not validate_tian_input([3, 5]).tian
    c = validate_tian_input([17])
    assert c.m is None and c.notes


@given(st.lists(odd_primes, min_size=1, max_size=4, unique=True))
def test_validate_invariants(primes):
    c = validate_tian_input(primes)
    prod = 1
    for p in c.primes:
        prod *= p
    assert prod == c.n and c.k == len(primes) - 1
    if c.m is not None:
        assert c.m in (c.n, 2 * c.n) and c.m % 8 in (5, 6, 7)
        assert c.m_star == (c.m if c.n % 4 == 1 else -c.m)
    if c.tian:
        assert c.p0 % 8 != 1 and all(p % 8 == 1 for p in c.primes[1:])


def test_parse_target():
    assert parse_target("5,17").n == 85
    c = parse_target("14")
    assert (c.n, c.m) == (7, 14)
    assert parse_target("1").n == 1
    with pytest.raises(InputError):
        parse_target("12")
