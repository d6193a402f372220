"""Certificates: assembling the evidence for one number, JSON form, cache, offline checks."""

from __future__ import annotations

import json
import os
import tempfile
from fractions import Fraction
from pathlib import Path

import mpmath

from . import __version__
from .classgroup import condition11_holds, four_rank_defect
from .criterion import build_graph, has_proper_even_partition, screen_non_congruent, spanning_tree_parity
from .descent import two_selmer_dim
from .lfunction import algebraic_part, central_derivative, root_number
from .ntheory import SquarefreeProduct, is_squarefree
from .twist import AlgebraicPoint, TwistCurve, frac_json, point_from_json

SCHEMA_VERSION = 1


def _frac(d) -> Fraction:
    return Fraction(int(d["num"]), int(d["den"]))


def criterion_block(ctx: SquarefreeProduct) -> dict | None:
    if not ctx.tian:
        return None
    g = build_graph(ctx)
    return {
        "graph": {"vertices": list(g.vertices), "edges": [list(e) for e in g.edges()]},
        "spanningTreeParity": spanning_tree_parity(g),
        "properEvenPartition": has_proper_even_partition(g),
        "fourRankDefect": four_rank_defect(ctx),
        "condition11": condition11_holds(ctx),
    }


def lvalue_block(m: int, digits: int = 20) -> dict:
    eps = root_number(m)
    out = {"m": m, "rootNumber": eps, "precisionDigits": digits}
    if eps == 1:
        lv = algebraic_part(m, digits)
        out["algebraicPart"] = frac_json(lv.algebraic_part)
        out["vanishes"] = lv.zero
        out["value"] = mpmath.nstr(lv.value, digits - 5)
    else:
        out["derivative"] = mpmath.nstr(central_derivative(m, digits), digits - 5)
    return out


def build_certificate(
    ctx: SquarefreeProduct,
    target: int,
    digits: int = 60,
    heegner: bool = True,
    lvalue: bool = True,
    max_k: int | None = None,
) -> dict:
    """Run criterion, descent and (when it applies) the Heegner construction for target.

    target is the number whose congruence is being decided; it is n or 2n for ctx.
    """
    cert: dict = {
        "schemaVersion": SCHEMA_VERSION,
        "generator": f"congruent {__version__}",
        "input": {
            "target": target,
            "primes": list(ctx.primes),
            "n": ctx.n,
            "m": ctx.m,
            "mStar": ctx.m_star,
            "tianFamily": ctx.tian,
            "notes": list(ctx.notes),
        },
        "precisionDigits": digits,
    }
    crit = criterion_block(ctx) if ctx.n > 1 else None
    cert["criterion"] = crit
    sel = two_selmer_dim(target, condition11=bool(crit and crit["condition11"]))
    cert["selmer"] = sel.to_json()
    cert["lvalue"] = lvalue_block(target) if lvalue else None
    cert["heegner"] = None
    cert["screen"] = None
    verdict = "inconclusive"
    reason = "no method applies"
    if sel.two_selmer_dim_mod_torsion == 0:
        verdict, reason = "nonCongruent", "2-isogeny Selmer groups leave no room for rank"
    elif target % 8 in (1, 2, 3) and ctx.n > 1 and sum(p % 8 != 1 for p in ctx.primes) <= 1:
        # the class-group screen; it rests on a theorem rather than on evidence we can
        # re-check, so it is recorded but does not change the verdict
        scr = screen_non_congruent(ctx, target)
        cert["screen"] = scr
        if scr["verdict"] == "nonCongruentByRemark":
            reason = "Selmer bound positive; class-group screen says non-congruent (conditional on the screen's theorem)"
    elif ctx.tian and target % 8 in (5, 6, 7) and crit and crit["condition11"]:
        if heegner and (max_k is None or ctx.k <= max_k):
            from .heegner import heegner_point

            res = heegner_point(ctx, digits)
            cert["heegner"] = res.to_json()
            if res.non_torsion:
                verdict, reason = "congruent", "non-torsion Heegner point with exact triangle"
            else:
                reason = "Heegner point is torsion"
        else:
            reason = "4-rank condition holds; Heegner step skipped"
    elif ctx.tian and target % 8 in (5, 6, 7):
        reason = "4-rank condition fails"
    cert["verdict"] = verdict
    cert["reason"] = reason
    return cert


# --- serialization and cache ----------------------------------------------------------


def dumps(cert: dict) -> str:
    return json.dumps(cert, sort_keys=True, indent=2) + "\n"


def loads(text: str) -> dict:
    return json.loads(text)


def cache_dir(explicit: str | None = None) -> Path | None:
    root = explicit or os.environ.get("CONGRUENT_CACHE")
    return Path(root) if root else None


def cache_path(root: Path, target: int) -> Path:
    return root / f"{target}.json"


def cache_write(root: Path, target: int, cert: dict) -> Path:
    root.mkdir(parents=True, exist_ok=True)
    path = cache_path(root, target)
    fd, tmp = tempfile.mkstemp(dir=root, prefix=f".{target}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(dumps(cert))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def cache_read(root: Path, target: int) -> dict | None:
    path = cache_path(root, target)
    if not path.exists():
        return None
    return loads(path.read_text())


# --- offline verification ---------------------------------------------------------------


class VerificationError(AssertionError):
    pass


def _require(cond: bool, msg: str):
    if not cond:
        raise VerificationError(msg)


def verify_certificate(cert: dict) -> bool:
    """Re-check a certificate from its own fields using exact arithmetic only."""
    _require(cert.get("schemaVersion") == SCHEMA_VERSION, "unknown schema version")
    target = int(cert["input"]["target"])
    _require(target >= 1 and is_squarefree(target), "target must be squarefree")
    verdict = cert["verdict"]
    if verdict == "nonCongruent":
        sel = cert["selmer"]
        _require(sel["m"] == target, "Selmer data is for another number")
        _require(sel["twoSelmerDimModTorsion"] == 0, "Selmer bound is not zero")
        _require(sel["phiDim"] + sel["psiDim"] - 2 == 0, "Selmer dimensions do not add up")
        return True
    if verdict != "congruent":
        return True
    h = cert["heegner"]
    _require(h is not None and h["torsion"] is None, "congruent verdict without a non-torsion point")
    m = int(h["m"])
    _require(m == target, "Heegner point lives on another twist")
    curve = TwistCurve(m)
    P = point_from_json(h["pointOnTwist"])
    _require(curve.on_curve(P), "point is not on the twist")
    _require(P[1] != 0, "point is 2-torsion")
    Q, T = point_from_json(h["half"]), point_from_json(h["shift"])
    _require(curve.on_curve(Q), "half is not on the twist")
    _require(curve.add(curve.mul(2 ** int(h["halfIndex"]), Q), T) == P, "half does not double back to the point")
    # a rational point of order > 2 is of infinite order unless it is one of the few
    # torsion points, and the torsion of these twists is exactly E[2]
    _require(not curve.is_torsion(P), "point is torsion")
    alg = h["pChi"]
    ap = AlgebraicPoint(int(alg["mStar"]), _frac(alg["x"]), _frac(alg["yOverSqrtMStar"]))
    _require(ap.check(), "P^chi fails the curve equation over the quadratic field")
    _require(ap.to_twist() == P, "P^chi and the twist point disagree")
    div = h["divisibility"]
    chain = [point_from_json(c) for c in div["chain"]]
    _require(len(chain) == div["maxIndex"] + 1, "chain length does not match the index")
    E2 = curve.two_torsion()
    for j, R in enumerate(chain):
        _require(curve.on_curve(R), "chain point off the curve")
        _require(any(curve.add(curve.mul(2**j, R), S) == P for S in E2), f"chain step {j} does not double to P + E[2]")
    if div["failsAt"] is not None:
        # exact halving again; this is a finite computation over Q, not an analytic step
        j = div["maxIndex"]
        level = {curve.add(R, S) for R in _level(curve, P, j) for S in E2}
        _require(all(not curve.halve(R) for R in level), "a further half exists")
    a, b, c = (_frac(s) for s in h["triangle"])
    _require(a > 0 and b > 0 and c > 0, "triangle sides must be positive")
    _require(a * a + b * b == c * c, "not a right triangle")
    _require(a * b / 2 == m, "triangle area is wrong")
    return True


def _level(curve: TwistCurve, P, j: int) -> set:
    E2 = curve.two_torsion()
    level = {curve.add(P, S) for S in E2}
    for _ in range(j):
        nxt = set()
        for R in level:
            for Q in curve.halve(R):
                for S in E2:
                    nxt.add(curve.add(Q, S))
        level = nxt
    return level
