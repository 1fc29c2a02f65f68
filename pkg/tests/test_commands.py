from io import StringIO

import pytest
from django.core.management import call_command
from django.core.management.base import CommandError

from reduction.af import parse_apx
from reduction.cli import main
from reduction.kexpr import parse_kexpr, validate
from reduction.witness import WitnessReport
from tests.conftest import fixture_path

RUNNING_AF = fixture_path("running.apx")
RUNNING_X = fixture_path("running.kx")


def run(*args, **options) -> str:
    out = StringIO()
    call_command(*args, stdout=out, stderr=StringIO(), **options)
    return out.getvalue()


def returncode(*args, **options) -> int:
    with pytest.raises(CommandError) as excinfo:
        run(*args, **options)
    return excinfo.value.returncode


@pytest.fixture
def single_leaf(tmp_path):
    af = tmp_path / "single.apx"
    af.write_text("arg(a).\n")
    x = tmp_path / "single.kx"
    x.write_text("1(a)\n")
    return str(af), str(x)


def test_validate():
    assert "ok width=3 nodes=11" in run("validate", RUNNING_AF, RUNNING_X)


def test_validate_mismatch():
    assert returncode("validate", RUNNING_AF, fixture_path("triangle.kx")) == 3


def test_missing_file(tmp_path):
    assert returncode("count", str(tmp_path / "none.apx"), RUNNING_X, sem="stb") == 3


def test_encode_to_stdout():
    out = run("encode", RUNNING_AF, RUNNING_X, sem="cf")
    assert out.startswith("c 1 e_z\n")
    assert "\np cnf " in out


def test_encode_to_files(tmp_path):
    formula = tmp_path / "stb.cnf"
    provenance = tmp_path / "stb.prov"
    out = run("encode", RUNNING_AF, RUNNING_X, sem="stb", output=str(formula), provenance=str(provenance))
    assert out.startswith("stable: ")
    header = next(line for line in formula.read_text().splitlines() if line.startswith("p cnf"))
    clauses = int(header.split()[3])
    assert len(provenance.read_text().splitlines()) == clauses


def test_encode_second_level():
    assert "\np qbf2 " in run("encode", RUNNING_AF, RUNNING_X, sem="prf")


def test_encode_with_searched_expression():
    assert "\np cnf " in run("encode", RUNNING_AF, sem="adm", expr_search=3)


def test_encode_defaults_to_the_trivial_expression():
    err = StringIO()
    out = StringIO()
    call_command("encode", RUNNING_AF, sem="adm", stdout=out, stderr=err)
    assert "\np cnf " in out.getvalue()
    assert "trivial expression of width 4" in err.getvalue()


def test_commands_default_to_the_trivial_expression():
    assert "ok width=4 nodes=9" in run("validate", RUNNING_AF)
    assert run("count", RUNNING_AF, sem="stb").strip() == "2"
    assert run("count", RUNNING_AF, sem="prf").strip() == "2"
    assert run("accept", RUNNING_AF, sem="stb", argument="z", mode="skept").strip() == "YES"
    assert run("witness", RUNNING_AF, sem="cf").strip().endswith(" ok")


def test_encode_dnf_matrix(single_leaf):
    out = run("encode", *single_leaf, sem="cf", dnf_matrix=True)
    lines = out.splitlines()
    assert any(line.startswith("p cnf ") for line in lines)
    assert "a 1 2 0" in lines


def test_solve(tmp_path):
    assert run("solve", fixture_path("phi_small.cnf")).splitlines() == ["SAT"]
    out = run("solve", fixture_path("phi_small.cnf"), model=True).splitlines()
    assert out[1].startswith("v ") and out[1].endswith(" 0")
    unsat = tmp_path / "unsat.cnf"
    unsat.write_text("p cnf 1 2\n1 0\n-1 0\n")
    assert run("solve", str(unsat)).strip() == "UNSAT"


def test_count():
    assert run("count", RUNNING_AF, RUNNING_X, sem="stb").strip() == "2"


def test_accept():
    assert run("accept", RUNNING_AF, RUNNING_X, sem="stb", argument="z", mode="skept").strip() == "YES"
    assert returncode("accept", RUNNING_AF, RUNNING_X, sem="stb", argument="u", mode="skept") == 1


def test_oracle():
    assert run("oracle", RUNNING_AF, sem="stb", enumerate=True).splitlines() == ["{z,u}", "{z,r}"]
    assert run("oracle", RUNNING_AF, sem="adm").strip() == "6"
    assert run("oracle", RUNNING_AF, sem="prf", argument="u").strip() == "YES"
    assert returncode("oracle", RUNNING_AF, sem="prf", argument="o") == 1


def test_oracle_limit(settings):
    settings.CWSAT_ORACLE_LIMIT = 2
    assert returncode("oracle", RUNNING_AF, sem="stb") == 4


def test_witness():
    lines = run("witness", RUNNING_AF, RUNNING_X, sem="stb").splitlines()
    assert lines[0].startswith("% k'=")
    assert lines[-1].endswith("budget=35 ok")


def test_witness_to_file(tmp_path):
    target = tmp_path / "witness.kx"
    out = run("witness", RUNNING_AF, RUNNING_X, sem="adm", output=str(target))
    assert out.strip().endswith(" ok")
    assert parse_kexpr(target.read_bytes()).width > 0


def test_witness_drift(monkeypatch):
    report = WitnessReport()
    report.problems["clauses"].append("clause k0 misses edge k0->x1")
    monkeypatch.setattr("reduction.management.commands.witness.verify_witness", lambda w, enc: report)
    assert returncode("witness", RUNNING_AF, RUNNING_X, sem="cf") == 5


def test_gen_hard(tmp_path):
    out = run("gen_hard", fixture_path("phi_small.cnf"))
    assert "arg(sat)." in out
    target = tmp_path / "hard.apx"
    summary = run("gen_hard", fixture_path("phi_small.cnf"), output=str(target))
    assert summary.strip() == "10 arguments, 15 attacks"
    assert parse_apx(target.read_bytes()).n == 10


def test_find_kexpr():
    af_path = fixture_path("cycle.apx")
    assert returncode("find_kexpr", af_path, kmax=2) == 1
    expression = parse_kexpr(run("find_kexpr", af_path, kmax=3))
    with open(af_path, "rb") as fh:
        validate(expression, parse_apx(fh.read()))


def test_cli_runs_hyphenated_commands(capsys):
    assert main(["count", "--sem", "stb", RUNNING_AF, RUNNING_X]) == 0
    assert capsys.readouterr().out.strip() == "2"
    assert main(["find-kexpr", fixture_path("cycle.apx"), "--kmax", "2"]) == 1


def test_cli_counts_without_an_expression(capsys):
    assert main(["count", "--sem", "stb", RUNNING_AF]) == 0
    captured = capsys.readouterr()
    assert captured.out.strip() == "2"
    assert "trivial expression" in captured.err


def test_cli_runs_the_settings_check(settings, capsys):
    settings.CWSAT_SEARCH_BUDGET = 0
    assert main(["count", "--sem", "stb", RUNNING_AF, RUNNING_X]) == 3
    assert "reduction.E004" in capsys.readouterr().err
    assert returncode("count", RUNNING_AF, RUNNING_X, sem="stb", skip_checks=False) == 3


def test_cli_usage_errors(capsys):
    assert main([]) == 2
    assert main(["bogus"]) == 2
    assert "unknown command 'bogus'" in capsys.readouterr().err
    assert main(["count"]) == 2
