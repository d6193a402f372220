"""Acceptance criteria 1-12.  Each test records PASS/FAIL in conftest.ACCEPTANCE."""

import math
import random
import time

import mpmath
import pytest
from mpmath import mpc, mpf

import conftest
from congruent import modular
from congruent.classgroup import ambiguous_reduced_count, condition11_holds
from congruent.criterion import (
    build_graph,
    check_family,
    condition11_via_graph,
    generate_family,
    has_proper_even_partition,
    spanning_tree_parity,
)
from congruent.descent import Torsor, certify_non_congruent, is_locally_solvable, signed_divisors, two_selmer_dim
from congruent.heegner import HeegnerSystem, distribution_report, heegner_point
from congruent.certificate import build_certificate
from congruent.lfunction import algebraic_part, zhao_check
from congruent.modular import TRANSLATIONS, uniformization
from congruent.ntheory import factor, is_squarefree, primes_up_to, validate_tian_input
from congruent.twist import TwistCurve
from oracles import local_solvable_brute


def record(key, ok, text):
    conftest.ACCEPTANCE[key] = (bool(ok), text)
    assert ok, text


def tian_products(bound, max_k=4):
    """Odd squarefree n < bound with exactly one prime factor not 1 mod 8 and k <= max_k."""
    spf = list(range(bound))
    for p in range(2, int(bound**0.5) + 1):
        if spf[p] == p:
            for q in range(p * p, bound, p):
                if spf[q] == q:
                    spf[q] = p
    out = []
    for n in range(3, bound, 2):
        x, primes, ok = n, [], True
        while x > 1:
            p = spf[x]
            x //= p
            if x % p == 0:
                ok = False
                break
            primes.append(p)
        if not ok:
            continue
        odd = [p for p in primes if p % 8 != 1]
        if len(odd) == 1 and len(primes) - 1 <= max_k:
            out.append(sorted(primes))
    return out


@pytest.fixture(scope="module")
def tian_sweep():
    return tian_products(10**5)


def test_criterion_01_triple_equivalence(tian_sweep):
    t0 = time.perf_counter()
    bad = []
    for primes in tian_sweep:
        ctx = validate_tian_input(primes)
        g = build_graph(ctx)
        a = spanning_tree_parity(g) == "odd"
        b = not has_proper_even_partition(g)
        c = condition11_holds(ctx)
        if not a == b == c:
            bad.append(ctx.n)
    dt = time.perf_counter() - t0
    record(1, not bad and dt < 600, f"{len(tian_sweep)} family n < 1e5, {len(bad)} mismatches, {dt:.1f}s")


def test_criterion_02_two_torsion_count(tian_sweep):
    bad = [p for p in tian_sweep if ambiguous_reduced_count(math.prod(p)) != 2 ** len(p)]
    record(2, not bad, f"|A[2]| = 2^(k+1) for {len(tian_sweep)} n; mismatches {len(bad)}")


DEPTH = {2: 10, 3: 7, 5: 5, 7: 4, 11: 4, 13: 4}


def test_criterion_03_selmer_dimensions():
    t0 = time.perf_counter()
    odd_bad, even_bad, total = [], [], 0
    oracle_checked = oracle_bad = 0
    for m in range(1, 3000):
        if m % 8 not in (5, 6, 7) or not is_squarefree(m):
            continue
        n = m // 2 if m % 2 == 0 else m
        ctx = validate_tian_input(sorted(factor(n)), twist=m)
        if not ctx.tian or not condition11_holds(ctx):
            continue
        total += 1
        r = two_selmer_dim(m, condition11=True)
        if (r.phi_dim, r.psi_dim, r.two_selmer_dim_mod_torsion) != (1, 2, 1):
            (even_bad if m % 2 == 0 else odd_bad).append((m, r.phi_dim, r.psi_dim))
        if m < 400:
            for kind in ("C", "Cprime"):
                for d in signed_divisors(m):
                    t = Torsor(d, kind, m)
                    for p in sorted(set(factor(2 * m))):
                        if p > 13:
                            continue
                        want = local_solvable_brute(d, t.c, p, DEPTH[p])
                        if want is None:
                            continue
                        oracle_checked += 1
                        oracle_bad += is_locally_solvable(t, p)[0] != want
    dt = time.perf_counter() - t0
    splits = sorted({(a, b) for _, a, b in even_bad})
    ok = not odd_bad and not even_bad and oracle_bad == 0 and dt < 300
    record(
        3,
        ok,
        f"{total} 4-rank-condition m < 3000; odd m off (1,2,1): {len(odd_bad)}; even m off: {len(even_bad)} "
        f"(splits {splits}, bound 1 in all); oracle {oracle_checked} decisions, {oracle_bad} disagreements; {dt:.0f}s",
    )


def test_criterion_04_non_congruent_certificates():
    done, skipped = [], []
    for m in (1, 2, 3, 10, 11, 17, 19, 26):
        r = certify_non_congruent(m)
        if r["verdict"] == "nonCongruent":
            done.append(m)
        else:
            skipped.append((m, r["selmer"].two_selmer_dim_mod_torsion))
    # "where the method applies": 17 has Sha[2] visible to both isogenies, bound 2;
    # the certificate still says inconclusive and records the class-group screen
    cert17 = build_certificate(validate_tian_input([17]), 17, 30, heegner=False, lvalue=False)
    screen_ok = cert17["verdict"] == "inconclusive" and cert17["screen"]["verdict"] == "nonCongruentByRemark"
    # no congruent number ever gets a non-congruent certificate
    congruent = [5, 6, 7, 13, 14, 15, 21, 22, 23, 29, 30, 31, 34, 37, 38, 39, 41, 46, 47, 85, 102, 119, 205]
    clash = [m for m in congruent if certify_non_congruent(m)["verdict"] == "nonCongruent"]
    ok = done == [1, 2, 3, 10, 11, 19, 26] and skipped == [(17, 2)] and screen_ok and not clash
    record(4, ok, f"descent certified {done}; out of reach {skipped} (screen agrees: {screen_ok}); clashes {clash}")


def test_criterion_05_calibration():
    U = uniformization(60)
    cusp = U.cusp_report()
    worst_cusp = max(v["error"] for v in cusp.values())
    hit = sorted(v["point"] or "O" for v in cusp.values())
    anchors = U.anchor_errors()
    worst_anchor = max(anchors.values())
    rng = random.Random(2024)
    worst_tr = mpf(0)
    with mpmath.workdps(U.dps):
        for _ in range(20):
            tau = mpc(rng.uniform(-0.5, 0.5), rng.uniform(0.02, 0.6))
            for name in TRANSLATIONS:
                worst_tr = max(worst_tr, U.translation_error(name, tau))
    ok = len(cusp) == 8 and len(set(hit)) == 8 and worst_cusp < mpf(10) ** -55 and worst_anchor < mpf(10) ** -55 and worst_tr < mpf(10) ** -50
    record(
        5,
        ok,
        f"8 cusps onto E'[(1+i)^3], worst {mpmath.nstr(worst_cusp, 3)}; anchors {mpmath.nstr(worst_anchor, 3)}; "
        f"translations at 20 tau {mpmath.nstr(worst_tr, 3)}",
    )


def _end_to_end(primes, twist=None):
    ctx = validate_tian_input(primes, twist=twist)
    t0 = time.perf_counter()
    res = heegner_point(ctx, 60)
    dt = time.perf_counter() - t0
    ok = res.non_torsion and res.divisibility.max_index == ctx.k + 1
    a, b, c = res.triangle
    ok = ok and a * a + b * b == c * c and a * b / 2 == ctx.m and res.algebraic.check()
    ok = ok and TwistCurve(ctx.m).on_curve(res.recognition.point)
    return ok, res, dt


def test_criterion_06_m5():
    modular._CACHE.clear()  # time the uniformization build too
    ok, res, dt = _end_to_end([5])
    ok = ok and dt < 30
    record(6, ok, f"m=5: index {res.divisibility.max_index}, triangle {tuple(map(str, res.triangle))}, {dt:.1f}s")


def test_criterion_07_m6_m7():
    out, ok = [], True
    for primes in ([3], [7]):
        good, res, dt = _end_to_end(primes)
        ok = ok and good and dt < 120
        out.append(f"m={res.m}: index {res.divisibility.max_index}, triangle {tuple(map(str, res.triangle))}, {dt:.1f}s")
    record(7, ok, "; ".join(out))


def test_criterion_08_m85():
    ok, res, dt = _end_to_end([5, 17])
    ok = ok and res.divisibility.max_index == 2 and dt < 900
    record(8, ok, f"m=85: index {res.divisibility.max_index}, triangle {tuple(map(str, res.triangle))}, {dt:.1f}s")


def test_criterion_09_distribution_relations():
    r85 = distribution_report(HeegnerSystem(85, 60), [5, 17])
    r51 = distribution_report(HeegnerSystem(51, 60), [3, 17])
    e1 = r85["sum y_d - 2^k y_0 (n = 5 mod 8)"]
    e2 = r51["sum y_d - 2^k y_0 (n = 3 mod 8)"]
    tol = mpf(10) ** -40
    record(9, e1 < tol and e2 < tol, f"n=85 residual {mpmath.nstr(e1, 3)}; n=51 residual {mpmath.nstr(e2, 3)}")


def test_criterion_10_height_ratio():
    p1 = next(p for p in primes_up_to(1000) if p % 8 == 1 and not algebraic_part(2 * p, 20).zero)
    lv1, lv0 = algebraic_part(2 * p1, 30), algebraic_part(2, 30)
    want = lv1.algebraic_part / lv0.algebraic_part
    # P^chi lives in the n = 5 p1 system with the character of Q(sqrt 5); P_0^chi0 is the n0 = 5 point
    h1 = heegner_point(validate_tian_input([5, p1]), 60, m0=5).height
    h0 = heegner_point(validate_tian_input([5]), 60).height
    rel = abs(h1 / h0 - float(want)) / float(want)
    deg = heegner_point(validate_tian_input([5, 17]), 60, m0=5)
    ok = p1 == 41 and rel < 1e-6 and not deg.non_torsion and deg.height < 1e-10
    record(
        10,
        ok,
        f"p1={p1}: height ratio {mpmath.nstr(h1 / h0, 12)} vs L ratio {want}, rel err {mpmath.nstr(rel, 3)}; "
        f"(85, 5) point is {deg.recognition.torsion}",
    )


def test_criterion_11_zhao_bounds():
    ones = [p for p in primes_up_to(2000) if p % 8 == 1]
    cases = [[p] for p in ones] + [[p, q] for i, p in enumerate(ones) for q in ones[i + 1 :] if p * q < 2000]
    bound_fail, eq_fail = [], []
    for c in cases:
        r = zhao_check(c)
        if not (r["E2m"]["boundHolds"] and r["Em"]["boundHolds"]):
            bound_fail.append(r["m"])
        if r["equalityPredicted"] != r["equalityObserved"]:
            eq_fail.append(r["m"])
    a1, a2 = algebraic_part(1, 30).two_adic_valuation, algebraic_part(2, 30).two_adic_valuation
    ok = not bound_fail and not eq_fail and (a1, a2) == (-3, -2)
    record(11, ok, f"{len(cases)} products; bound failures {bound_fail}; equality mismatches {eq_fail}; anchors v2 = {a1}, {a2}")


def test_criterion_12_families():
    notes, ok = [], True
    for p0 in (3, 5, 7):
        spec = generate_family(p0, 3)
        good = spec.complete and check_family(spec)
        for mask in range(8):
            chosen = [p for t, p in enumerate(spec.sigma) if mask >> t & 1]
            good = good and condition11_via_graph(validate_tian_input([p0, *chosen]), check=True)
        certified = []
        for primes in [[p0]] + [[p0, p] for p in spec.sigma]:
            ctx = validate_tian_input(primes)
            cert = build_certificate(ctx, ctx.m, 60, lvalue=False)
            good = good and cert["verdict"] == "congruent"
            certified.append(ctx.m)
        ok = ok and good
        notes.append(f"p0={p0} sigma={list(spec.sigma)} certified {certified}")
    record(12, ok, "; ".join(notes))
