from __future__ import annotations

import json
import subprocess
import sys

import pytest

from contactsub import cli
from contactsub.errors import ConfigError, UnknownCheck, UnknownExample
from contactsub.report import CHECKS, CONVENTIONS, RunConfig, applicable_checks, emit, run
from contactsub.catalog import example


def test_run_structure_equation_hopf():
    rep = run(RunConfig("hopf_s3", ("structure_equation",), 100, 42))
    (c,) = rep.checks
    assert rep.passed and c.residual_max <= 1e-7 and c.points_used == 100


def test_run_warped_T():
    assert run(RunConfig("warped_quadratic", ("warped_T",), 20)).passed


def test_failing_check_is_data_not_exception():
    rep = run(RunConfig("olszak_exp", ("sasakian",), 3))
    assert not rep.passed and rep.checks[0].residual_max > 0.1


def test_explicit_check_outside_its_class_reports_residual():
    # (e2) on Sasakian S^3: A* phi + phi A* = 2 phi^2 != 0
    rep = run(RunConfig("hopf_s3", ("a_star_identities",), 3))
    assert not rep.passed and rep.checks[0].details["e2"] == pytest.approx(2.0)


def test_config_errors():
    with pytest.raises(UnknownCheck):
        run(RunConfig("hopf_s3", ("bogus",)))
    with pytest.raises(UnknownExample):
        run(RunConfig("nowhere"))
    with pytest.raises(ConfigError):
        run(RunConfig("hopf_s3", ("warped_T",)))
    with pytest.raises(ConfigError):
        run(RunConfig("olszak_exp", ("b_symmetry",)))
    with pytest.raises(ConfigError):
        run(RunConfig("hopf_s3", ("kahler_base",), 3))
    with pytest.raises(ConfigError):
        run(RunConfig("hopf_s3", ("structure_equation",), points=0))


def test_empty_check_list():
    rep = run(RunConfig("hopf_s3", (), 5))
    assert rep.checks == () and rep.passed
    assert json.loads(emit(rep, "json"))["passed"] is True


def test_json_round_trip_and_keys():
    rep = run(RunConfig("product_flat_r2", ("b_symmetry", "oneill_symmetries"), 4))
    data = json.loads(emit(rep, "json"))
    assert list(data) == ["config", "conventions", "checks", "passed"]
    assert data == rep.to_dict()
    assert data["conventions"] == CONVENTIONS
    for c, orig in zip(data["checks"], rep.checks):
        assert {"name", "residual_max", "residual_mean", "points", "tolerance", "passed"} <= set(c)
        assert c["residual_max"] == orig.residual_max


def test_text_has_one_line_per_check():
    rep = run(RunConfig("product_flat_r2", ("b_symmetry", "b_formula", "pullback_omega"), 3))
    text = emit(rep, "text").decode()
    for c in rep.checks:
        assert sum(line.startswith(c.name + " ") for line in text.splitlines()) == 1
    assert text.rstrip().endswith("overall: PASS")


def test_all_applies_tags():
    names = applicable_checks(example("hopf_s3"))
    assert "horizontal_integrability" not in names and "structure_equation" in names
    assert "warped_T" in applicable_checks(example("warped_quadratic"))
    assert set(CHECKS) >= set(names)


def test_cli_exit_codes(capsys, tmp_path):
    assert cli.main(["verify", "--example", "hopf_s3", "--checks", "bogus"]) == 2
    assert cli.main(["verify", "--example", "nowhere"]) == 2
    assert cli.main(["verify", "--example", "olszak_exp", "--checks", "sasakian", "--points", "2"]) == 1
    assert cli.main(["verify", "--example", "hopf_s3", "--checks", "kahler_base", "--points", "2"]) == 2
    out = tmp_path / "r.json"
    rc = cli.main(["verify", "--example", "warped_quadratic", "--checks", "warped_T", "--points", "5",
                   "--format", "json", "--out", str(out)])
    assert rc == 0 and json.loads(out.read_text())["passed"] is True
    assert cli.main(["list"]) == 0
    listing = capsys.readouterr().out
    assert "hopf_s3" in listing and "structure_equation" in listing


def test_cli_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        cli.main(["verify", "--example", "hopf_s3", "--points", "many"])
    assert exc.value.code == 2


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "contactsub", "list"], capture_output=True, text=True)
    assert r.returncode == 0 and "flat_cosymplectic_r5" in r.stdout
