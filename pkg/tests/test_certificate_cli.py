import json

import pytest

from congruent import certificate as C
from congruent.cli import EXIT_FAILURE, EXIT_INCONCLUSIVE, EXIT_INPUT, EXIT_OK, main, scan_row
from congruent.ntheory import parse_target

# squarefree congruent numbers below 100 (classical table; 57 and 73 are not congruent)
CONGRUENT_BELOW_100 = {
    5, 6, 7, 13, 14, 15, 21, 22, 23, 29, 30, 31, 34, 37, 38, 39, 41, 46, 47,
    53, 55, 61, 62, 65, 69, 70, 71, 77, 78, 79, 85, 86, 87, 93, 94, 95,
}


@pytest.fixture(scope="module")
def cert5():
    ctx = parse_target("5")
    return C.build_certificate(ctx, 5, 60)


def test_certificate_is_deterministic(cert5):
    again = C.build_certificate(parse_target("5"), 5, 60)
    assert C.dumps(again) == C.dumps(cert5)


def test_round_trip(cert5):
    assert C.loads(C.dumps(cert5)) == cert5
    assert cert5["verdict"] == "congruent"
    assert cert5["schemaVersion"] == C.SCHEMA_VERSION


def test_verify_accepts(cert5):
    assert C.verify_certificate(C.loads(C.dumps(cert5)))


@pytest.mark.parametrize(
    "path,value",
    [
        (("heegner", "triangle", 0, "num"), "5"),
        (("heegner", "pointOnTwist", "X", "num"), "1682"),
        (("heegner", "divisibility", "maxIndex"), 3),
        (("heegner", "m"), 13),
        (("schemaVersion",), 99),
    ],
)
def test_verify_rejects_tampering(cert5, path, value):
    bad = C.loads(C.dumps(cert5))
    node = bad
    for key in path[:-1]:
        node = node[key]
    node[path[-1]] = value
    with pytest.raises((C.VerificationError, KeyError, TypeError, ValueError, ZeroDivisionError)):
        C.verify_certificate(bad)


def test_verify_non_congruent():
    cert = C.build_certificate(parse_target("3"), 3, 30, heegner=False)
    assert cert["verdict"] == "nonCongruent"
    assert C.verify_certificate(cert)
    cert["selmer"]["twoSelmerDimModTorsion"] = 1
    with pytest.raises(C.VerificationError):
        C.verify_certificate(cert)


def test_cache_atomic(tmp_path, cert5):
    path = C.cache_write(tmp_path, 5, cert5)
    assert path.name == "5.json"
    assert C.cache_read(tmp_path, 5) == cert5
    assert C.cache_read(tmp_path, 6) is None
    assert not [p for p in tmp_path.iterdir() if p.suffix == ".tmp"]


def test_cache_env(monkeypatch, tmp_path):
    monkeypatch.setenv("CONGRUENT_CACHE", str(tmp_path))
    assert C.cache_dir() == tmp_path
    assert C.cache_dir("/elsewhere").as_posix() == "/elsewhere"
    monkeypatch.delenv("CONGRUENT_CACHE")
    assert C.cache_dir() is None


def test_cli_certify_uses_cache(tmp_path, capsys):
    assert main(["certify", "6", "--cache", str(tmp_path), "--json"]) == EXIT_OK
    first = capsys.readouterr().out
    assert json.loads(first)["verdict"] == "congruent"
    assert (tmp_path / "6.json").exists()
    assert main(["certify", "6", "--cache", str(tmp_path), "--json"]) == EXIT_OK
    assert capsys.readouterr().out == first


@pytest.mark.parametrize(
    "argv,code",
    [
        (["certify", "5"], EXIT_OK),
        (["certify", "1"], EXIT_OK),
        (["certify", "34"], EXIT_INCONCLUSIVE),
        (["certify", "4"], EXIT_INPUT),
        (["certify", "3,3"], EXIT_INPUT),
        (["certify", "3,5"], EXIT_INCONCLUSIVE),
        (["selmer", "10"], EXIT_OK),
        (["selmer", "12"], EXIT_INPUT),
        (["lvalue", "5"], EXIT_OK),
        (["lvalue", "3"], EXIT_OK),
        (["graph", "5,17"], EXIT_OK),
        (["graph", "15"], EXIT_INPUT),
        (["scan", "0", "5"], EXIT_INPUT),
        (["family", "3", "1"], EXIT_OK),
        (["heegner", "13"], EXIT_OK),
    ],
)
def test_cli_exit_codes(argv, code, capsys):
    assert main(argv) == code
    capsys.readouterr()


def test_cli_verify_file(tmp_path, cert5, capsys):
    good = tmp_path / "good.json"
    good.write_text(C.dumps(cert5))
    assert main(["verify", str(good)]) == EXIT_OK
    bad = C.loads(C.dumps(cert5))
    bad["heegner"]["triangle"][2] = {"num": "7", "den": "1"}
    path = tmp_path / "bad.json"
    path.write_text(C.dumps(bad))
    assert main(["verify", str(path)]) == EXIT_FAILURE
    capsys.readouterr()


def test_cli_graph_dot(capsys):
    main(["graph", "5,17"])
    out = capsys.readouterr().out
    assert out.startswith("digraph") or out.startswith("graph")
    assert "17" in out


def test_scan_agrees_with_table(capsys):
    assert main(["scan", "1", "100", "--json"]) == EXIT_OK
    rows = json.loads(capsys.readouterr().out)["rows"]
    seen = {r["N"]: r["verdict"] for r in rows}
    for N, v in seen.items():
        if v == "congruent":
            assert N in CONGRUENT_BELOW_100, N
        if v == "nonCongruent":
            assert N not in CONGRUENT_BELOW_100, N
    for N in (5, 6, 7, 13, 14, 22, 23, 29, 31, 37, 38, 47, 53, 61, 62, 71, 79):
        assert seen[N] == "congruent", N
    for N in (1, 2, 3, 10, 11, 19, 26):
        assert seen[N] == "nonCongruent", N
    assert 4 not in seen


def test_scan_parallel_matches_serial(capsys):
    main(["scan", "1", "300", "--json"])
    serial = json.loads(capsys.readouterr().out)
    main(["scan", "1", "300", "--json", "--workers", "3"])
    assert json.loads(capsys.readouterr().out) == serial


def test_scan_row_with_heegner():
    row = scan_row(85, heegner=True)
    assert row["verdict"] == "congruent" and row["basis"] == "Heegner point"
    assert scan_row(12) is None
