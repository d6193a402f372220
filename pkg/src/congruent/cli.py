"""Command line front end: certify, scan, family, heegner, selmer, lvalue, graph."""

from __future__ import annotations

import argparse
import json
import sys
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor

import mpmath

from . import certificate as C
from .classgroup import condition11_holds
from .criterion import build_graph, check_family, condition11_via_graph, generate_family, spanning_tree_parity
from .descent import two_selmer_dim
from .lfunction import algebraic_part
from .ntheory import InputError, factor, is_squarefree, parse_target, validate_tian_input

EXIT_OK, EXIT_INCONCLUSIVE, EXIT_INPUT, EXIT_FAILURE = 0, 2, 3, 4


def _target(text: str):
    ctx = parse_target(text)
    target = ctx.m if "," in text else int(text)
    if target is None:
        raise InputError(f"no target in {{n, 2n}} for {text}")
    return ctx, target


def _emit(obj, as_json: bool, text: str):
    if as_json:
        sys.stdout.write(C.dumps(obj))
    else:
        print(text)


def _summary(cert: dict) -> str:
    lines = [f"{cert['input']['target']}: {cert['verdict']} ({cert['reason']})"]
    h = cert.get("heegner")
    if h and h.get("torsion") is None:
        a, b, c = (f"{s['num']}/{s['den']}" for s in h["triangle"])
        lines.append(f"  triangle {a}, {b}, {c}")
        lines.append(f"  divisibility index {h['divisibility']['maxIndex']}, height {h['canonicalHeight']}")
    sel = cert["selmer"]
    lines.append(f"  Selmer dims phi={sel['phiDim']} psi={sel['psiDim']} bound={sel['twoSelmerDimModTorsion']}")
    return "\n".join(lines)


def _verdict_code(cert: dict) -> int:
    return EXIT_OK if cert["verdict"] in ("congruent", "nonCongruent") else EXIT_INCONCLUSIVE


def certify(text: str, args) -> dict:
    ctx, target = _target(text)
    root = C.cache_dir(args.cache)
    if root is not None:
        cached = C.cache_read(root, target)
        if cached is not None and cached.get("precisionDigits") == args.prec:
            return cached
    t0 = time.perf_counter()
    cert = C.build_certificate(ctx, target, args.prec, heegner=True, max_k=args.max_k)
    if args.verbose:
        print(f"certify {target}: {time.perf_counter() - t0:.2f}s", file=sys.stderr)
    if cert["verdict"] == "congruent":
        C.verify_certificate(cert)
    if root is not None:
        C.cache_write(root, target, cert)
    return cert


def cmd_certify(args) -> int:
    cert = certify(args.target, args)
    _emit(cert, args.json, _summary(cert))
    return _verdict_code(cert)


def cmd_verify(args) -> int:
    with open(args.file) as fh:
        cert = C.loads(fh.read())
    try:
        C.verify_certificate(cert)
    except C.VerificationError as exc:
        print(f"verification failed: {exc}")
        return EXIT_FAILURE
    print(f"{cert['input']['target']}: {cert['verdict']} verified")
    return EXIT_OK


def scan_row(N: int, heegner: bool = False, prec: int = 60, max_k: int | None = None) -> dict | None:
    """Classify one number; None when N is not squarefree."""
    if not is_squarefree(N):
        return None
    n = N // 2 if N % 2 == 0 else N
    row = {"N": N, "residue": N % 8, "k": None, "tian": False, "condition11": None, "verdict": "inconclusive", "basis": ""}
    if n > 1:
        ctx = validate_tian_input(sorted(factor(n)), twist=N)
        row["k"] = ctx.k
        row["tian"] = ctx.tian
        if ctx.tian:
            cond = condition11_via_graph(ctx, check=True)
            row["condition11"] = cond
            if N % 8 in (5, 6, 7) and cond:
                row["verdict"], row["basis"] = "congruent", "4-rank condition"
                if heegner and (max_k is None or ctx.k <= max_k):
                    cert = C.build_certificate(ctx, N, prec, heegner=True, lvalue=False)
                    row["basis"] = "Heegner point" if cert["verdict"] == "congruent" else "Heegner point torsion"
                    row["verdict"] = cert["verdict"] if cert["verdict"] == "congruent" else "inconclusive"
                return row
    sel = two_selmer_dim(N)
    if sel.two_selmer_dim_mod_torsion == 0:
        row["verdict"], row["basis"] = "nonCongruent", "descent"
    return row


def _scan_worker(task):
    lo, hi, heegner, prec, max_k = task
    return [r for r in (scan_row(N, heegner, prec, max_k) for N in range(lo, hi + 1)) if r is not None]


def cmd_scan(args) -> int:
    lo, hi = args.lo, args.hi
    if not 1 <= lo <= hi <= 10**7:
        raise InputError("need 1 <= lo <= hi <= 10^7")
    workers = max(1, args.workers)
    step = max(1, (hi - lo + 1 + workers - 1) // workers)
    tasks = [(a, min(hi, a + step - 1), args.heegner, args.prec, args.max_k) for a in range(lo, hi + 1, step)]
    if workers == 1:
        shards = [_scan_worker(t) for t in tasks]
    else:
        with ProcessPoolExecutor(workers) as pool:
            shards = list(pool.map(_scan_worker, tasks))
    rows = [r for shard in shards for r in shard]
    by_verdict = Counter(r["verdict"] for r in rows)
    by_residue = Counter((r["residue"], r["verdict"]) for r in rows)
    by_k = Counter((r["k"], r["verdict"]) for r in rows if r["k"] is not None)
    summary = {
        "range": [lo, hi],
        "rows": rows,
        "counts": dict(sorted(by_verdict.items())),
        "byResidue": {f"{a}:{b}": c for (a, b), c in sorted(by_residue.items())},
        "byK": {f"{a}:{b}": c for (a, b), c in sorted(by_k.items())},
    }
    root = C.cache_dir(args.cache)
    if root is not None:
        for r in rows:
            C.cache_write(root / "scan", r["N"], r)
    if args.json:
        sys.stdout.write(C.dumps(summary))
    else:
        for r in rows:
            if r["verdict"] != "inconclusive" or args.all:
                print(f"{r['N']:>8}  {r['verdict']:<13} {r['basis']}")
        print("counts:", ", ".join(f"{k}={v}" for k, v in summary["counts"].items()))
    return EXIT_OK


def cmd_family(args) -> int:
    spec = generate_family(args.p0, args.count, args.bound)
    if not spec.complete:
        print(f"only {len(spec.sigma)} primes found below {args.bound}", file=sys.stderr)
    out = {"p0": spec.p0, "sigma": list(spec.sigma), "complete": spec.complete, "recheck": check_family(spec), "certificates": []}
    budget = args.max_k if args.max_k is not None else 1
    prefix = [args.p0]
    chain = [list(prefix)] + [prefix + list(spec.sigma[: i + 1]) for i in range(len(spec.sigma))]
    for primes in chain:
        if len(primes) - 1 > budget:
            break
        ctx = validate_tian_input(primes)
        cert = C.build_certificate(ctx, ctx.m, args.prec, heegner=True, lvalue=False)
        out["certificates"].append(cert)
    if args.json:
        sys.stdout.write(C.dumps(out))
    else:
        print(f"p0={spec.p0} sigma={list(spec.sigma)} recheck={'ok' if out['recheck'] else 'FAILED'}")
        for cert in out["certificates"]:
            print(_summary(cert))
    return EXIT_OK if all(c["verdict"] == "congruent" for c in out["certificates"]) else EXIT_INCONCLUSIVE


def cmd_heegner(args) -> int:
    from .heegner import HeegnerSystem, distribution_report, galois_relation_report, heegner_point

    ctx, target = _target(args.target)
    if ctx.tian and target % 8 not in (5, 6, 7) and ctx.m is not None and target == ctx.n:
        # an odd n: fall back to whichever of n, 2n the construction uses
        ctx = validate_tian_input(ctx.primes)
        target = ctx.m
    if not ctx.tian or target % 8 not in (5, 6, 7):
        raise InputError("Heegner construction needs n = p0 p1 ... pk (p1..pk = 1 mod 8) with target 5, 6 or 7 mod 8")
    res = heegner_point(ctx, args.prec)
    out = res.to_json()
    if args.relations:
        H = HeegnerSystem(ctx.n, args.prec)
        rel = {**galois_relation_report(H), **distribution_report(H, ctx.primes)}
        out["relations"] = {k: mpmath.nstr(v, 5) for k, v in sorted(rel.items())}
    if args.json:
        sys.stdout.write(C.dumps(out))
    else:
        if res.non_torsion:
            print(f"P on Y^2 = X^3 - {target}^2 X: X = {res.recognition.point[0]}, Y = {res.recognition.point[1]}")
            print(f"divisibility index {res.divisibility.max_index}, canonical height {out['canonicalHeight']}")
            print("triangle", ", ".join(str(s) for s in res.triangle))
        else:
            print(f"P^chi is torsion ({res.recognition.torsion})")
        for k, v in out.get("relations", {}).items():
            print(f"  {k}: {v}")
    return EXIT_OK if res.non_torsion else EXIT_INCONCLUSIVE


def cmd_selmer(args) -> int:
    m = int(args.m)
    if m < 1 or not is_squarefree(m):
        raise InputError("m must be a positive squarefree integer")
    rep = two_selmer_dim(m)
    _emit(rep.to_json(), args.json, f"m={m}: phi {rep.phi_group} (dim {rep.phi_dim}), psi {rep.psi_group} (dim {rep.psi_dim}), bound {rep.two_selmer_dim_mod_torsion}")
    return EXIT_OK


def cmd_lvalue(args) -> int:
    d = int(args.d)
    if d < 1 or not is_squarefree(d):
        raise InputError("d must be a positive squarefree integer")
    out = C.lvalue_block(d, args.prec)
    if out["rootNumber"] == 1:
        lv = algebraic_part(d, args.prec)
        text = f"L(E^({d}),1) = {out['value']}, algebraic part {lv.algebraic_part}, v2 = {lv.two_adic_valuation}"
    else:
        text = f"root number -1; L'(E^({d}),1) = {out['derivative']}"
    _emit(out, args.json, text)
    return EXIT_OK


def cmd_graph(args) -> int:
    ctx, _ = _target(args.target)
    if not ctx.tian:
        raise InputError("the graph is only defined when exactly one prime of n is not 1 mod 8")
    g = build_graph(ctx)
    if args.json:
        out = {"vertices": list(g.vertices), "edges": [list(e) for e in g.edges()], "spanningTreeParity": spanning_tree_parity(g), "condition11": condition11_holds(ctx)}
        sys.stdout.write(json.dumps(out, indent=2) + "\n")
    else:
        sys.stdout.write(g.to_dot())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prec", type=int, default=60, help="working precision in decimal digits")
    common.add_argument("--cache", help="cache directory (default: $CONGRUENT_CACHE)")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--max-k", type=int, default=None, help="skip the Heegner step above this k")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="congruent", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("certify", parents=[common], help="decide one number")
    s.add_argument("target", help="a squarefree integer, or a comma separated list of odd primes")
    s.set_defaults(func=cmd_certify)

    s = sub.add_parser("verify", parents=[common], help="re-check a certificate file offline")
    s.add_argument("file")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("scan", parents=[common], help="classify a range")
    s.add_argument("lo", type=int)
    s.add_argument("hi", type=int)
    s.add_argument("--heegner", action="store_true", help="also build Heegner points (slow)")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--all", action="store_true", help="also list inconclusive rows")
    s.set_defaults(func=cmd_scan)

    s = sub.add_parser("family", parents=[common], help="generate a family and certify its prefixes")
    s.add_argument("p0", type=int)
    s.add_argument("count", type=int)
    s.add_argument("--bound", type=int, default=10**6)
    s.set_defaults(func=cmd_family)

    s = sub.add_parser("heegner", parents=[common], help="compute P^chi and its exact form")
    s.add_argument("target")
    s.add_argument("--relations", action="store_true", help="report the Galois and distribution relations")
    s.set_defaults(func=cmd_heegner)

    s = sub.add_parser("selmer", parents=[common], help="2-isogeny Selmer groups")
    s.add_argument("m")
    s.set_defaults(func=cmd_selmer)

    s = sub.add_parser("lvalue", parents=[common], help="central L-value of a twist")
    s.add_argument("d")
    s.set_defaults(func=cmd_lvalue)

    s = sub.add_parser("graph", parents=[common], help="prime graph in DOT")
    s.add_argument("target")
    s.set_defaults(func=cmd_graph)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ArithmeticError, AssertionError) as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
