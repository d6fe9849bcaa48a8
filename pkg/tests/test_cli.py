import csv
import io
import json
import math
import subprocess
import sys

import pytest

from psibranches.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def test_eval_principal(capsys):
    code, out, _ = run(capsys, "eval", "--a", "1/2", "--z", "1,0", "--branch", "principal:0")
    assert code == 0
    (r,) = rows(out)
    w = float(r["w_re"])
    assert abs(math.sinh(w / 2) * math.exp(w) - 1) <= 1e-12
    assert float(r["residual"]) <= 1e-10
    assert r["region"] == "Omega(0)"


def test_eval_zero(capsys):
    code, out, _ = run(capsys, "eval", "--a", "1/3", "--z", "0,0")
    assert code == 0
    (r,) = rows(out)
    assert float(r["w_re"]) == 0.0 and float(r["w_im"]) == 0.0


def test_eval_exit_codes(capsys):
    code, _, err = run(capsys, "eval", "--a", "0.7314", "--z", "1,1", "--branch", "tilde:1")
    assert code == 2 and "principal" in err
    assert run(capsys, "eval", "--a", "1/2", "--z", "1")[0] == 1
    assert run(capsys, "eval", "--a", "1/2", "--z", "1,0", "--branch", "bogus")[0] == 1
    assert run(capsys, "eval", "--a", "5/2", "--z", "1,0")[0] == 1
    assert run(capsys, "eval", "--a", "1.5", "--z", "1,0")[0] == 2
    assert run(capsys, "eval", "--a", "1/2", "--z=-1,0")[0] == 2  # on the cut
    assert run(capsys, "eval", "--a", "1/2", "--z=-1,0", "--extended")[0] == 0
    # the derivative is undefined at the critical value
    assert run(capsys, "eval", "--a", "1/2", "--z=-0.19245008972987523,0", "--extended")[0] == 3


def test_missing_flag_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["eval", "--z", "1,0"])
    assert exc.value.code == 1


def test_geometry_gamma(capsys):
    code, out, _ = run(capsys, "geometry", "--a", "1/4", "--what", "gamma", "--resolution", "8")
    assert code == 0
    shapes = {r["curve"]: r["shape"] for r in rows(out)}
    assert len(shapes) == 8
    assert {k for k, s in shapes.items() if s == "cubic"} == {"gamma:1", "gamma:2", "gamma:5", "gamma:6"}
    assert run(capsys, "geometry", "--a", "0.6", "--what", "gamma")[0] == 2


def test_geometry_critical_points(capsys):
    code, out, _ = run(capsys, "geometry", "--a", "1/2", "--what", "critical-points")
    assert code == 0
    rs = rows(out)
    crit = sorted(float(r["z_re"]) for r in rs if r["kind"] == "critical")
    s3 = math.sqrt(3) / 9
    assert crit == pytest.approx([-s3, s3], abs=1e-15)
    bps = sorted(float(r["z_re"]) for r in rs if r["kind"] == "branch_point")
    assert bps == pytest.approx([-s3, 0.0, s3], abs=1e-15)


def test_geometry_gcurve(capsys):
    code, out, _ = run(capsys, "geometry", "--a", "1/2", "--what", "gcurve", "--xi0", "0", "--resolution", "4")
    assert code == 0
    rs = rows(out)
    at_pi = [r for r in rs if abs(float(r["eta"]) - math.pi) < 1e-12][0]
    assert abs(float(at_pi["x"])) < 1e-15 and float(at_pi["y"]) == pytest.approx(-1.0)
    # the curve closes over one period
    assert float(rs[0]["x"]) == pytest.approx(float(rs[-1]["x"]), abs=1e-15)


@pytest.mark.parametrize("what", ["xi", "regions"])
def test_geometry_other(capsys, what):
    code, out, _ = run(capsys, "geometry", "--a", "1/4", "--what", what, "--resolution", "6")
    assert code == 0 and len(rows(out)) > 0


def test_continue_examples(capsys):
    code, out, _ = run(capsys, "continue", "--a", "1/2", "--path", "circle:0,0,0.1,1", "--start-branch", "tilde:-1", "--every", "512")
    assert code == 0
    final = [r for r in rows(out) if r["cut"] == "final"][0]
    assert final["to"] != "tilde:-1"
    code, out, _ = run(capsys, "continue", "--a", "1/2", "--path", "circle:1,0,0.1,1", "--start-branch", "principal:0", "--every", "512")
    assert code == 0
    final = [r for r in rows(out) if r["cut"] == "final"][0]
    assert final["to"] == "principal:0"


def test_continue_errors(capsys):
    assert run(capsys, "continue", "--a", "1/2", "--path", "poly:1,0;1,0")[0] == 1
    assert run(capsys, "continue", "--a", "1/2", "--path", "spiral:1")[0] == 1
    assert run(capsys, "continue", "--a", "1/2", "--path", "circle:0,0,-1,1")[0] == 1
    # passes through the branch point x_a
    assert run(capsys, "continue", "--a", "1/2", "--path", "poly:-0.1,0;-0.3,0", "--start-branch", "principal:0")[0] == 2


def test_verify_suite(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "core", "--a", "1/2", "--a", "1/4", "--a", "1/3")
    assert code == 0
    rs = rows(out)
    assert rs and all(r["passed"] == "true" for r in rs)
    assert [r["name"] for r in rs] == sorted(r["name"] for r in rs)
    assert all(math.isfinite(float(r["error"])) and math.isfinite(float(r["tol"])) for r in rs)


def test_verify_limits(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "limits")
    assert code == 0
    errs = {r["name"]: float(r["error"]) for r in rows(out)}
    small = [errs[f"limits/small_a/a={s!r}"] for s in (0.1, 0.01, 0.001)]
    assert small[0] > small[1] > small[2]


def test_verify_failure_exit(capsys, monkeypatch):
    from psibranches import checks

    monkeypatch.setitem(checks.SUITE_FUNCS, "core", lambda params, seed: [checks.Check("x", False, 1.0, 0.0)])
    assert run(capsys, "verify", "--suite", "core")[0] == 4


def test_csv_json_value_equal(capsys):
    argv = ["geometry", "--a", "1/2", "--what", "critical-points"]
    _, c, _ = run(capsys, *argv)
    _, j, _ = run(capsys, *argv, "--format", "json")
    data = json.loads(j)
    assert data["meta"]["a"] == "1/2"
    for r_csv, r_json in zip(rows(c), data["records"]):
        for k, v in r_json.items():
            if isinstance(v, float) or isinstance(v, int):
                assert float(r_csv[k]) == float(v)
            else:
                assert r_csv[k] == str(v)


def test_seventeen_digits(capsys):
    _, out, _ = run(capsys, "eval", "--a", "1/2", "--z", "1,0")
    (r,) = rows(out)
    w = float(r["w_re"])
    assert r["w_re"] == f"{w:.17g}"
    assert len(r["w_re"].replace(".", "").lstrip("0")) <= 17


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "psibranches", "eval", "--a", "1/2", "--z", "1,0"], capture_output=True, text=True
    )
    assert proc.returncode == 0 and "principal:0" in proc.stdout
