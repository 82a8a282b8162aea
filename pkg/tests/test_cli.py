"""The command line entry point, driven in-process."""

import io

from peculiar.cli import main
from peculiar.curves import Slope, classify
from peculiar.selftest import golden_text
from peculiar.textio import parse_module, parse_multicurve


def run(capsys, monkeypatch, argv, stdin=""):
    monkeypatch.setattr("sys.stdin", io.StringIO(stdin))
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_b1_pipeline_matches_golden(capsys, monkeypatch):
    code, curve, _ = run(capsys, monkeypatch, ["curve", "build", "b", "1"])
    assert code == 0
    code, text, _ = run(capsys, monkeypatch, ["module", "pi", "--quotient", "3,1", "--canonical"], curve)
    assert code == 0 and text == golden_text("b1")


def test_twist_through_the_bimodule(capsys, monkeypatch):
    _, curve, _ = run(capsys, monkeypatch, ["curve", "build", "r", "1/2"])
    code, out, _ = run(capsys, monkeypatch, ["bimod", "apply", "dehn-twist", "--arc", "3", "--recognize"], curve)
    assert code == 0
    (L,) = parse_multicurve(out).loops
    assert classify(L) == ("rational", Slope(3, 2))


def test_module_check_d2(capsys, monkeypatch):
    _, curve, _ = run(capsys, monkeypatch, ["curve", "build", "d", "2"])
    _, mod, _ = run(capsys, monkeypatch, ["module", "pi"], curve)
    assert parse_module(mod).rank == 10
    code, _, _ = run(capsys, monkeypatch, ["module", "check-d2"], mod)
    assert code == 0
    broken = "".join(line for line in mod.splitlines(keepends=True) if "q14" not in line)
    code, _, _ = run(capsys, monkeypatch, ["module", "check-d2"], broken)
    assert code == 1


def test_parse_errors_exit_2_with_position(capsys, monkeypatch):
    code, _, err = run(capsys, monkeypatch, ["curve", "show"], "loop a:p9\n")
    assert code == 2
    assert "line 1, column 6" in err


def test_unknown_command_exits_2(capsys, monkeypatch):
    code, _, _ = run(capsys, monkeypatch, ["nonsense"])
    assert code == 2


def test_missing_bimodule_exits_1(capsys, monkeypatch):
    code, _, err = run(capsys, monkeypatch, ["bimod", "validate", "conjugation"])
    assert code == 1 and "not available" in err


def test_even_segment_does_not_extend(capsys, monkeypatch):
    _, curve, _ = run(capsys, monkeypatch, ["curve", "build", "even-segment"])
    _, mod, _ = run(capsys, monkeypatch, ["module", "pi"], curve)
    code, out, _ = run(capsys, monkeypatch, ["module", "extend-minus", "--matching", "14,23"], mod)
    assert code == 1 and "no extension" in out


def test_pair_and_output_file(capsys, monkeypatch, tmp_path):
    target = tmp_path / "pair.txt"
    code, out, _ = run(capsys, monkeypatch, ["pair", "r:0/1", "r:1/0", "-o", str(target)])
    assert code == 0 and out == ""
    assert "total rank 2" in target.read_text()
    code, out, _ = run(capsys, monkeypatch, ["-o", str(target), "pair", "r:1/1", "r:1/0"])
    assert "total rank 2" in target.read_text()


def test_trace_goes_to_stderr(capsys, monkeypatch):
    _, curve, _ = run(capsys, monkeypatch, ["curve", "build", "b", "1"])
    code, _, err = run(capsys, monkeypatch, ["bimod", "apply", "dehn-twist", "--trace"], curve)
    assert code == 0 and "cancel" in err


def test_report_mutation(capsys, monkeypatch):
    code, out, _ = run(capsys, monkeypatch, ["report", "mutation", "--curveset", "pretzel-2m3", "--closures", "1"])
    assert code == 0 and out.rstrip().endswith("overall: PASS")


def test_selftest_subset(capsys, monkeypatch):
    code, out, _ = run(capsys, monkeypatch, ["selftest", "--only", "2,9"])
    assert code == 0
    assert out.count("PASS") == 2
