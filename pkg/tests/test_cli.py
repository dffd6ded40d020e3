import json
import subprocess
import sys

import pytest

from besselbel.cli import main, parse_config


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_semigroup_mass_including_atom(capsys):
    code, out, _ = run(["semigroup", "--delta", "0", "--x", "1", "--t", "1", "--f", "one"], capsys)
    assert code == 0
    assert float(out) == pytest.approx(1.0, abs=1e-12)


def test_derivative_prints_analytic_and_fd(capsys):
    code, out, _ = run(["derivative", "--delta", "2", "--x", "1", "--t", "0.5", "--f", "exp_neg_y2"], capsys)
    assert code == 0
    vals = dict(line.split("\t")[:2] for line in out.strip().splitlines())
    assert float(vals["analytic"]) == pytest.approx(float(vals["fd"]), rel=1e-6)


def test_density_delta0_reports_atom(capsys):
    code, out, _ = run(["density", "--delta", "0", "--t", "1", "--x", "1", "--y", "1"], capsys)
    assert code == 0
    assert out.splitlines()[0].startswith("atom\t0.6065306597")


@pytest.mark.parametrize("argv", [
    ["semigroup", "--delta", "-1", "--x", "1", "--t", "1"],
    ["semigroup", "--delta", "1", "--x", "1", "--t", "0"],
    ["bel-mc", "--delta", "0", "--x", "1", "--t", "1", "--n", "10"],
    ["rn-check", "--delta", "1", "--delta-prime", "1.5", "--x", "1", "--t", "1"],
    ["scaling", "--delta", "2", "--y", "1"],
    ["moments", "--delta", "1.2"],
    ["flow", "--delta", "1", "--x", "1", "--y", "0.5", "--t", "1"],
    ["full-suite", "--only", "16"],
    ["nonsense"],
    [],
])
def test_usage_errors_exit_1(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 1
    assert err


def test_unwritable_output_exit_1(capsys):
    code, _, err = run(["semigroup", "--delta", "1", "--x", "1", "--t", "1", "--out", "/nonexistent/dir/x.csv"], capsys)
    assert code == 1
    assert "cannot write" in err


def test_config_file_supplies_required_options(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"delta": 1, "x": 1, "t": 0.5, "seed": 9}))
    rc = parse_config(["semigroup", "--config", str(cfg), "--t", "1"])
    assert rc.params["t"] == 1.0 and rc.params["delta"] == 1.0 and rc.seed == 9
    assert isinstance(rc.params["delta"], float)
    cfg.write_text(json.dumps({"delta": 1, "bogus": 2}))
    code, _, err = run(["semigroup", "--config", str(cfg), "--x", "1", "--t", "1"], capsys)
    assert code == 1 and "bogus" in err


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("BESSEL_BEL_SEED", "77")
    assert parse_config(["semigroup", "--delta", "1", "--x", "1", "--t", "1"]).seed == 77


def test_reports_are_byte_identical(tmp_path, capsys):
    outs = []
    for k in range(2):
        p = tmp_path / f"r{k}.jsonl"
        code, _, _ = run(["bel-mc", "--delta", "2", "--x", "1", "--t", "0.5", "--n", "2000", "--seed", "5",
                          "--dt", "0.01", "--format", "jsonl", "--out", str(p)], capsys)
        assert code in (0, 2)
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]
    rec = json.loads(outs[0])
    assert rec["mc"]["seed"] == 5 and rec["mc"]["n"] == 2000


def test_failed_check_exits_2(capsys):
    # sign with the e^L constant violates the Lipschitz bound at short times
    code, out, _ = run(["baseline", "--phi", "sign", "--x", "0.5", "--t", "1", "--n", "500", "--dt", "0.01"], capsys)
    assert code == 2
    assert "bound_ok\tFalse" in out


def test_csv_output(tmp_path, capsys):
    p = tmp_path / "m.csv"
    code, _, _ = run(["martingale", "--delta", "2", "--x", "1", "--t-grid", "0.1,0.2", "--n", "2000",
                      "--dt", "0.01", "--out", str(p)], capsys)
    assert code in (0, 2)
    assert p.read_text().splitlines()[0].startswith("name,delta,x,T")


def test_module_entry_point_help():
    res = subprocess.run([sys.executable, "-m", "besselbel", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    for cmd in ("density", "semigroup", "derivative", "bel-mc", "rn-check", "martingale",
                "moments", "flow", "scaling", "baseline", "full-suite"):
        assert cmd in res.stdout
