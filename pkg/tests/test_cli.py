import json
import subprocess
import sys

import pytest

from sparse_lna.cli import main


def test_gen_solve_check(tmp_path, capsys):
    inst = tmp_path / "cs.json"
    point = tmp_path / "z.json"
    assert main(["gen", "--family", "cs_gaussian", "--n", "128", "--p", "48", "--s", "6", "--seed", "3",
                 "-o", str(inst)]) == 0
    assert main(["solve", str(inst), "--beta", "1.0", "--save-point", str(point)]) == 0
    out = capsys.readouterr().out
    assert "status          Converged" in out
    err = float(out.split("abs_error")[1].split()[0])
    assert err < 1e-8
    assert main(["check", str(inst), "--point", str(point), "--beta", "1.0"]) == 0
    out = capsys.readouterr().out
    assert "is_strong_LS = true" in out and "derivatives PASS" in out


def test_gen_mvsk_and_check_json(tmp_path, capsys):
    inst = tmp_path / "m.json"
    point = tmp_path / "z.json"
    assert main(["gen", "--family", "mvsk", "--n", "8", "--s", "3", "--t-obs", "200", "-o", str(inst)]) == 0
    assert main(["solve", str(inst), "--save-point", str(point)]) == 0
    assert "f_value" in capsys.readouterr().out
    assert main(["check", str(inst), "--point", str(point), "--json"]) == 0
    last = capsys.readouterr().out.strip().splitlines()[-1]
    assert json.loads(last)["is_strong_LS"] is True


def test_gen_from_panel(tmp_path):
    from sparse_lna.problems import synthetic_panel

    csv_path = tmp_path / "p.csv"
    synthetic_panel(6, 100, seed=0).to_csv(csv_path)
    assert main(["gen", "--family", "mvsk", "--panel", str(csv_path), "--s", "2", "-o", str(tmp_path / "i.json")]) == 0


def test_sweep(tmp_path):
    plan = tmp_path / "plan.json"
    out = tmp_path / "res.csv"
    plan.write_text(json.dumps({"family": "cs_dct", "grid": [{"n": 64, "r": 0.25, "s": 3}], "trials": 3}))
    assert main(["sweep", "--plan", str(plan), "--output", str(out), "--no-timing"]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 4 and lines[0].startswith("family,n,p,m,s")
    assert (tmp_path / "res_summary.json").exists()


def test_usage_errors_exit_1(tmp_path, capsys):
    with pytest.raises(SystemExit) as info:
        main(["solve"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 1
    assert main(["gen", "--family", "cs_gaussian", "--n", "10", "-o", str(tmp_path / "x.json")]) == 1
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) >= 1 and "error" in err[-1]


def test_runtime_errors_exit_2(tmp_path, capsys):
    assert main(["solve", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("[]")
    assert main(["sweep", "--plan", str(bad)]) == 2
    assert len(capsys.readouterr().err.strip().splitlines()) == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "sparse_lna", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "sweep" in proc.stdout
