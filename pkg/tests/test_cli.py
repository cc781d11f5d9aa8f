import io
import json
from contextlib import redirect_stderr, redirect_stdout

import pytest

from tame3.cli import main


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        try:
            code = main(list(argv))
        except SystemExit as exc:
            code = exc.code
    return code, out.getvalue(), err.getvalue()


def test_check_swap():
    code, out, _ = run("check", "(X2; X1; X3)")
    assert code == 0
    assert out.strip() == "automorphism, inverse = (X2; X1; X3)"


def test_check_square_fails():
    code, out, _ = run("check", "(X1^2; X2; X3)")
    assert code == 1
    assert "NotInvertible" in out


def test_parse_error_is_usage_error():
    code, _, err = run("check", "(X1^2; X2; X3")
    assert code == 2
    assert "error" in err


def test_unknown_verb_is_usage_error():
    assert run("frobnicate")[0] == 2


def test_arity_is_checked():
    assert run("compose", "(X2; X1; X3)")[0] == 2
    assert run("invert")[0] == 2


def test_compose_and_invert():
    code, out, _ = run("compose", "(X1 + X2; X2; X3)", "(X1; X2 + X1^2; X3)")
    assert code == 0 and out.strip() == "(X1^2 + X1 + X2; X1^2 + X2; X3)"
    code, out, _ = run("invert", "(X1 + X3*X2^2; X2; X3)")
    assert code == 0 and out.strip() == "(-X2^2*X3 + X1; X2; X3)"


def test_file_input(tmp_path):
    f = tmp_path / "map.txt"
    f.write_text("(X2; X1; X3)\n")
    assert run("check", f"@{f}")[0] == 0
    assert run("check", f"@{tmp_path / 'missing.txt'}")[0] == 2


def test_factor2_plane():
    code, out, _ = run("factor2", "(X1; X2 + X1^3)")
    assert code == 0
    assert out.strip() == "T: (X1; X1^3 + X2)"
    assert run("factor2", "(X1^2; X2)")[0] == 1


def test_factor2_ring():
    code, out, _ = run("factor2", "--ring", "(X1; X2 + X1*X3^2; X3)")
    assert code == 0
    assert out.splitlines()[0] == "s(2,1,X1*X3^2)"


def test_psi_verb():
    code, out, _ = run("psi", "s(1,1,X2*X3) s(2,3,X1^2)")
    assert code == 0
    assert out.splitlines()[0].startswith("H3:")


def test_verify_relations_small():
    code, out, _ = run("verify-relations", "--samples", "30", "--seed", "7", "--psi")
    assert code == 0
    assert "total: 90/90 pass" in out


def test_verify_relations_deterministic():
    a = run("verify-relations", "--samples", "10", "--seed", "3", "--format", "structured")
    b = run("verify-relations", "--samples", "10", "--seed", "3", "--format", "structured")
    assert a == b
    records = [json.loads(line) for line in a[1].splitlines()]
    assert records[0]["seed"] == 3


def test_replay_proof_small():
    code, out, _ = run("replay-proof", "--samples", "2", "--seed", "1")
    assert code == 0
    summary = json.loads(out.splitlines()[-1].split(" ", 1)[1])
    assert summary["failed"] == 0 and summary["chains"] == 18


def test_nagata_verb():
    code, out, _ = run("nagata")
    assert code == 0
    assert "H3: false" in out and "H2: false" in out
    assert "t13-conjugate in H1T: unknown" in out


def test_bad_option_values():
    assert run("verify-relations", "--samples", "-1")[0] == 2
    assert run("verify-relations", "--format", "xml")[0] == 2
