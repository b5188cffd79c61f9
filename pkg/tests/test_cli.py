from __future__ import annotations

import importlib
import json
import subprocess
import sys
from importlib import resources
from pathlib import Path

import pytest

from higgsspec.cli.main import COMMANDS, FREE_COMMANDS, HIGGS_COMMANDS, main

cli_main = importlib.import_module("higgsspec.cli.main")

CORPUS = Path(str(resources.files("higgsspec.corpus")))


def run(argv, capsys) -> tuple[int, dict]:
    rc = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return rc, json.loads(out) if out.strip() else {}


def doc_for(command: str) -> Path | None:
    if command in FREE_COMMANDS:
        return None
    return CORPUS / ("commuting.sb" if command in HIGGS_COMMANDS else "double_sheet.sb")


# -- exit-code contract ----------------------------------------------------


@pytest.mark.parametrize("command", [c for c in COMMANDS if c != "selftest"])
def test_every_command_produces_a_verdict(command, capsys):
    path = doc_for(command)
    argv = [command] + ([path] if path else []) + ["--samples", "3"]
    if command == "lemma32":
        argv += ["--functionals", "1,0,0;0,1,0"]
    rc, rep = run(argv, capsys)
    assert rc == 0
    assert rep["schema"] == 1 and rep["command"] == command
    assert rep["verdict"] and rep["input_digest"].startswith("sha256:")


@pytest.mark.parametrize("command", [c for c in COMMANDS if c not in FREE_COMMANDS])
def test_missing_block_is_input_error(command, capsys, tmp_path):
    # a spectral-only document for higgs commands and vice versa
    other = CORPUS / ("split.sb" if command in HIGGS_COMMANDS else "commuting.sb")
    rc, rep = run([command, other], capsys)
    assert rc == 1
    assert rep["error"]["kind"] == "input"


@pytest.mark.parametrize("command", [c for c in COMMANDS if c not in FREE_COMMANDS])
def test_missing_file_is_input_error(command, capsys, tmp_path):
    rc, rep = run([command, tmp_path / "absent.sb"], capsys)
    assert rc == 1 and rep["error"]["kind"] == "input"
    rc, _ = run([command], capsys)
    assert rc == 1


def test_parse_error_carries_diagnostic(capsys, tmp_path):
    bad = tmp_path / "bad.sb"
    bad.write_text("chart { dim=2; vars=z1,z2 }\nspectral rank=2 { s[1]=u1; s[2]=u1; }\n")
    rc, rep = run(["membership", bad], capsys)
    assert rc == 1
    diag = rep["error"]["diagnostic"]
    assert diag["kind"] == "degree" and diag["line"] == 2


def test_bad_flags_are_input_errors(capsys):
    assert run(["frobnicate"], capsys)[0] == 1
    assert run(["membership", CORPUS / "split.sb", "--point", "1"], capsys)[0] == 1
    assert run(["membership", CORPUS / "split.sb", "--point", "1,x"], capsys)[0] == 1
    assert run(["membership", CORPUS / "split.sb", "--seed", "abc"], capsys)[0] == 1
    assert run(["embed", CORPUS / "double_sheet.sb", "--rank", "1"], capsys)[0] == 1
    assert run(["pushforward-check", CORPUS / "split.sb", "--component", "9"], capsys)[0] == 1
    assert run(["lemma32", "--functionals", "1,0;1"], capsys)[0] == 1


def test_internal_failure_is_exit_two(capsys, monkeypatch):
    def boom(*args):
        raise RuntimeError("simulated")
    monkeypatch.setitem(cli_main.HANDLERS, "decompose", boom)
    rc, rep = run(["decompose", CORPUS / "split.sb"], capsys)
    assert rc == 2 and rep["error"]["kind"] == "internal"


def test_rejections_are_verdicts_not_errors(capsys):
    rc, rep = run(["membership", CORPUS / "sum_of_squares.sb"], capsys)
    assert rc == 0 and rep["verdict"] == "NonMember"
    rc, rep = run(["surjectivity", CORPUS / "sum_of_squares.sb", "--samples", "3"], capsys)
    assert rc == 0 and rep["verdict"] == "Failed"
    rc, rep = run(["integrability", CORPUS / "non_integrable.sb"], capsys)
    assert rc == 0 and rep["verdict"] == "NonIntegrable"


# -- reports ---------------------------------------------------------------


def test_membership_report(capsys):
    rc, rep = run(["membership", CORPUS / "split.sb", "--point", "1,2"], capsys)
    (res,) = rep["results"]
    assert res["verdict"] == "AcceptExact" and res["exact"]
    assert sorted(tuple(e["covector"]) for e in res["cycle"]) == [("0", "1"), ("1", "0")]


def test_decompose_report(capsys):
    rc, rep = run(["decompose", CORPUS / "double_sheet.sb"], capsys)
    (res,) = rep["results"]
    assert res["count"] == 2 and res["multiplicities"] == [2, 1]


def test_selftest_passes(capsys):
    rc, rep = run(["selftest"], capsys)
    assert rc == 0 and rep["verdict"] == "Pass"
    (res,) = rep["results"]
    assert all(c["passed"] == c["total"] for c in res["checks"])


def test_out_flag_writes_file(capsys, tmp_path):
    out = tmp_path / "report.json"
    rc = main(["equations", str(CORPUS / "split.sb"), "--out", str(out)])
    assert rc == 0 and capsys.readouterr().out == ""
    rep = json.loads(out.read_text())
    assert rep["results"][0]["count"] == 3


def test_settings_block_and_flag_precedence(capsys):
    rc, rep = run(["equations", CORPUS / "varying_sheets.sb"], capsys)
    assert rep["seed"] == 7
    rc, rep = run(["equations", CORPUS / "varying_sheets.sb", "--seed", "3"], capsys)
    assert rep["seed"] == 3


def test_timing_is_opt_in(capsys):
    _, rep = run(["equations", CORPUS / "split.sb"], capsys)
    assert "timing_seconds" not in rep
    _, rep = run(["equations", CORPUS / "split.sb", "--timing"], capsys)
    assert rep["timing_seconds"] >= 0


# -- determinism -----------------------------------------------------------


@pytest.mark.parametrize("path", sorted(CORPUS.glob("*.sb")), ids=lambda p: p.name)
def test_reports_are_byte_identical(path, capsys):
    for command in COMMANDS:
        if command in FREE_COMMANDS:
            continue
        a = main([command, str(path), "--seed", "5", "--samples", "4"])
        first = capsys.readouterr().out
        b = main([command, str(path), "--seed", "5", "--samples", "4"])
        second = capsys.readouterr().out
        assert a == b and first == second


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "higgsspec", "membership", str(CORPUS / "split.sb"), "--point", "0,0"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"] == "AcceptExact"
    proc = subprocess.run([sys.executable, "-m", "higgsspec", "membership", str(tmp_path / "nope.sb")],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 1 and "higgsspec:" in proc.stderr


def test_stdin_input():
    text = (CORPUS / "split.sb").read_text()
    proc = subprocess.run([sys.executable, "-m", "higgsspec", "split", "-"], input=text,
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["verdict"] == "Split"
