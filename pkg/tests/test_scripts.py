"""Smoke tests for the helper scripts."""

import runpy
import pathlib

SCRIPTS = pathlib.Path(__file__).resolve().parent.parent / "scripts"


def test_emit_figures_writes_csv(tmp_path):
    mod = runpy.run_path(str(SCRIPTS / "emit_figures.py"))
    assert mod["run"](tmp_path) == 0
    files = sorted(p.name for p in tmp_path.iterdir())
    assert "gamma_a1-4.csv" in files
    assert all((tmp_path / f).read_text().startswith("# tool=psibranches") for f in files)


def test_monodromy_demo_runs(capsys):
    mod = runpy.run_path(str(SCRIPTS / "monodromy_demo.py"))
    assert mod["run"]("1/2", 2) == 0
    out = capsys.readouterr().out
    assert "after loop: tilde:3" in out and "after loop: tilde:5" in out
