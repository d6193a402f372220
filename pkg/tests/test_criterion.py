import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from congruent.classgroup import condition11_holds
from congruent.criterion import (
    PrimeGraph,
    build_graph,
    check_family,
    condition11_via_graph,
    generate_family,
    graph_from_primes,
    has_proper_even_partition,
    has_proper_even_partition_brute,
    screen_non_congruent,
    spanning_tree_count_brute,
    spanning_tree_parity,
)
from congruent.descent import two_selmer_dim
from congruent.ntheory import jacobi, primes_up_to, validate_tian_input
from oracles import proper_even_partition_brute, spanning_tree_count


def graph(k, edges):
    adj = [[0] * k for _ in range(k)]
    for a, b in edges:
        adj[a][b] = adj[b][a] = 1
    return PrimeGraph(tuple(range(k)), tuple(tuple(r) for r in adj))


def test_build_graph_examples():
    assert list(build_graph(validate_tian_input([5])).edges()) == []
    assert list(build_graph(validate_tian_input([5, 17])).edges()) == [(5, 17)]
    assert list(build_graph(validate_tian_input([5, 41])).edges()) == []


def test_partition_examples():
    assert not has_proper_even_partition(graph(1, []))
    assert has_proper_even_partition(graph(2, []))
    assert not has_proper_even_partition(graph(2, [(0, 1)]))


def test_parity_examples():
    assert spanning_tree_parity(graph(1, [])) == "odd"
    assert spanning_tree_parity(graph(5, [(0, i) for i in range(1, 5)])) == "odd"
    assert spanning_tree_parity(graph(2, [])) == "even"


@st.composite
def random_graphs(draw):
    k = draw(st.integers(1, 7))
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
    mask = draw(st.integers(0, 2 ** len(pairs) - 1))
    return k, [e for t, e in enumerate(pairs) if mask >> t & 1]


@given(random_graphs())
def test_parity_against_exhaustive_count(data):
    k, edges = data
    g = graph(k, edges)
    count = spanning_tree_count(k, edges)
    assert spanning_tree_parity(g) == ("odd" if count % 2 else "even")
    assert spanning_tree_count_brute(g) == count


@given(random_graphs())
def test_partition_against_exhaustive_search(data):
    k, edges = data
    g = graph(k, edges)
    want = proper_even_partition_brute(k, edges)
    assert has_proper_even_partition(g) == want == has_proper_even_partition_brute(g)


def test_all_graphs_on_five_vertices():
    # exhaustive: every labelled graph on 5 vertices
    pairs = [(i, j) for i in range(5) for j in range(i + 1, 5)]
    for mask in range(2 ** len(pairs)):
        edges = [e for t, e in enumerate(pairs) if mask >> t & 1]
        g = graph(5, edges)
        odd = spanning_tree_count(5, edges) % 2 == 1
        assert (spanning_tree_parity(g) == "odd") == odd == (not has_proper_even_partition(g))


def test_condition11_via_graph_examples():
    assert condition11_via_graph(validate_tian_input([5]), check=True)
    assert condition11_via_graph(validate_tian_input([5, 17]), check=True)
    assert not condition11_via_graph(validate_tian_input([5, 41]), check=True)


def test_graph_edge_symmetry_guard():
    with pytest.raises(ValueError):
        graph_from_primes([3, 7])  # (3/7) = -(7/3)


def test_generate_family_examples():
    spec = generate_family(5, 1)
    assert spec.sigma == (17,) and spec.complete
    assert generate_family(7, 0).sigma == ()
    spec = generate_family(3, 2)
    assert len(spec.sigma) == 2
    a, b = spec.sigma
    assert jacobi(a, 3) == jacobi(b, 3) == -1 and jacobi(a, b) == 1


@pytest.mark.parametrize("p0", [3, 5, 7, 11, 13, 19, 23])
def test_family_conditions_and_subsets(p0):
    spec = generate_family(p0, 4)
    assert spec.complete and check_family(spec)
    for mask in range(16):
        chosen = [p for t, p in enumerate(spec.sigma) if mask >> t & 1]
        ctx = validate_tian_input([p0, *chosen])
        assert condition11_via_graph(ctx, check=True)


def test_family_rejects_bad_seed():
    with pytest.raises(ValueError):
        generate_family(17, 1)
    with pytest.raises(ValueError):
        generate_family(9, 1)


def test_family_partial_when_bound_small():
    spec = generate_family(5, 5, bound=100)
    assert not spec.complete and len(spec.sigma) < 5


def test_screen_examples():
    assert screen_non_congruent(validate_tian_input([3]), 3)["verdict"] == "nonCongruentByRemark"
    assert screen_non_congruent(validate_tian_input([11]), 11)["verdict"] == "nonCongruentByRemark"
    r = screen_non_congruent(validate_tian_input([17]), 17)
    assert r["branch"] == "quartic" and r["product"] == -1 and r["verdict"] == "nonCongruentByRemark"


def test_screen_never_contradicts_descent():
    # a remark verdict must be compatible with the descent: no Heegner-style odd
    # Selmer bound, and where descent decides it must say non-congruent too
    for p in primes_up_to(400)[1:]:
        for m in (p, 2 * p):
            if m % 8 not in (1, 2, 3):
                continue
            r = screen_non_congruent(validate_tian_input([p]), m)
            if r["verdict"] != "nonCongruentByRemark":
                continue
            rep = two_selmer_dim(m)
            assert rep.two_selmer_dim_mod_torsion % 2 == 0


def test_random_tian_products_graph_vs_classgroup():
    rng = random.Random(7)
    ones = [p for p in primes_up_to(3000) if p % 8 == 1]
    seeds = [p for p in primes_up_to(200) if p % 8 != 1][1:]
    for _ in range(150):
        primes = [rng.choice(seeds), *rng.sample(ones, rng.randint(0, 4))]
        ctx = validate_tian_input(primes)
        assert condition11_via_graph(ctx) == condition11_holds(ctx)
