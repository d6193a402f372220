"""Graph criterion on the primes of n, the family generator, and the quick
non-congruence screens for m = 1, 2, 3 mod 8."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from . import gf2
from .classgroup import condition11_holds
from .ntheory import SquarefreeProduct, is_prime, jacobi, primes_up_to, quartic_residue_of_two


@dataclass(frozen=True)
class PrimeGraph:
    vertices: tuple[int, ...]
    adjacency: tuple[tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return len(self.vertices)

    def edges(self):
        for i, j in combinations(range(self.size), 2):
            if self.adjacency[i][j]:
                yield self.vertices[i], self.vertices[j]

    def laplacian_rows(self) -> list[int]:
        rows = []
        for i, row in enumerate(self.adjacency):
            deg = sum(row) & 1
            bits = sum(v << j for j, v in enumerate(row)) | (deg << i)
            rows.append(bits)
        return rows

    def to_dot(self) -> str:
        lines = ["graph G {"]
        lines += [f"  p{p};" for p in self.vertices]
        lines += [f"  p{a} -- p{b};" for a, b in self.edges()]
        lines.append("}")
        return "\n".join(lines) + "\n"


def graph_from_primes(primes) -> PrimeGraph:
    primes = tuple(primes)
    k = len(primes)
    adj = [[0] * k for _ in range(k)]
    for i, j in combinations(range(k), 2):
        s = jacobi(primes[i], primes[j])
        if s != jacobi(primes[j], primes[i]):
            raise ValueError("edge symbol is not symmetric for these primes")
        if s == -1:
            adj[i][j] = adj[j][i] = 1
    return PrimeGraph(primes, tuple(tuple(r) for r in adj))


def build_graph(ctx: SquarefreeProduct) -> PrimeGraph:
    return graph_from_primes(ctx.primes)


def has_proper_even_partition(g: PrimeGraph) -> bool:
    # all-ones is always in the kernel, so anything beyond it is a proper partition
    return len(gf2.kernel(g.laplacian_rows(), g.size)) >= 2


def has_proper_even_partition_brute(g: PrimeGraph) -> bool:
    k = g.size
    for mask in range(1, (1 << k) - 1):
        ok = True
        for v in range(k):
            side = mask >> v & 1
            across = sum(g.adjacency[v][u] for u in range(k) if (mask >> u & 1) != side)
            if across % 2:
                ok = False
                break
        if ok:
            return True
    return False


def spanning_tree_parity(g: PrimeGraph) -> str:
    if g.size <= 1:
        return "odd"
    rows = g.laplacian_rows()[1:]
    reduced = [r >> 1 for r in rows]  # drop column 0
    return "odd" if gf2.det(reduced, g.size - 1) else "even"


def spanning_tree_count_brute(g: PrimeGraph) -> int:
    """Count spanning trees by testing every (size-1)-subset of edges."""
    k = g.size
    if k <= 1:
        return 1
    edges = [(i, j) for i, j in combinations(range(k), 2) if g.adjacency[i][j]]
    count = 0
    for subset in combinations(edges, k - 1):
        parent = list(range(k))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        acyclic = True
        for i, j in subset:
            ri, rj = find(i), find(j)
            if ri == rj:
                acyclic = False
                break
            parent[ri] = rj
        count += acyclic
    return count


def condition11_via_graph(ctx: SquarefreeProduct, check: bool = False) -> bool:
    if not ctx.tian:
        raise ValueError("graph criterion needs exactly one prime not 1 mod 8")
    result = spanning_tree_parity(build_graph(ctx)) == "odd"
    if check and result != condition11_holds(ctx):
        raise AssertionError(f"graph and class group disagree for n={ctx.n}")
    return result


@dataclass(frozen=True)
class FamilySpec:
    p0: int
    sigma: tuple[int, ...]
    search_bound: int
    complete: bool


def generate_family(p0: int, count: int, bound: int = 10**6) -> FamilySpec:
    if p0 % 8 == 1 or p0 == 2 or not is_prime(p0):
        raise ValueError("p0 must be an odd prime not congruent to 1 mod 8")
    chosen: list[int] = []
    if count > 0:
        for p in primes_up_to(bound):
            if p % 8 != 1 or jacobi(p, p0) != -1:
                continue
            if all(jacobi(p, q) == 1 for q in chosen):
                chosen.append(p)
                if len(chosen) == count:
                    break
    return FamilySpec(p0, tuple(chosen), bound, len(chosen) == count)


def check_family(spec: FamilySpec) -> bool:
    for i, p in enumerate(spec.sigma):
        if p % 8 != 1 or not is_prime(p) or jacobi(p, spec.p0) != -1:
            return False
        if any(jacobi(p, q) != 1 for q in spec.sigma[:i]):
            return False
    return True


def screen_non_congruent(ctx: SquarefreeProduct, m: int | None = None) -> dict:
    """Two-branch rule for m = n or 2n with m = 1, 2, 3 mod 8."""
    m = m if m is not None else next((c for c in (ctx.n, 2 * ctx.n) if c % 8 in (1, 2, 3)), None)
    if m is None or m % 8 not in (1, 2, 3) or m not in (ctx.n, 2 * ctx.n):
        return {"verdict": "inapplicable", "reason": "m is not 1, 2 or 3 mod 8"}
    if not ctx.primes:
        return {"verdict": "inapplicable", "reason": "n = 1"}
    if not condition11_holds(ctx):
        return {"verdict": "inapplicable", "reason": "4-rank condition fails", "m": m}
    if ctx.p0 % 8 != 1:
        return {"verdict": "nonCongruentByRemark", "m": m}
    prod = 1
    for p in ctx.primes:
        prod *= quartic_residue_of_two(p) * (-1) ** ((p - 1) // 8)
    return {
        "verdict": "nonCongruentByRemark" if prod == -1 else "undetermined",
        "branch": "quartic",
        "product": prod,
        "m": m,
    }
