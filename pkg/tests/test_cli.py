import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from wrtlab import asymptotics as asy
from wrtlab import cli
from wrtlab.weights import PRESETS


def run(*argv, env=None):
    proc = subprocess.run(
        [sys.executable, "-m", "wrtlab.cli", *argv], capture_output=True, text=True, env=env
    )
    return proc.returncode, proc.stdout, proc.stderr


def _strip_ts(text):
    out = []
    for line in text.splitlines():
        d = json.loads(line)
        d.pop("timestamp")
        out.append(d)
    return out


def test_simulate_single_vertex(capsys):
    assert cli.main(["simulate", "--law", "rrt", "--n", "1", "--replicates", "1", "--parallel", "1"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["maxDegree"] == 0 and rec["replicateIndex"] == 0 and rec["schemaVersion"] == 1


def test_simulate_deterministic(tmp_path):
    args = ["simulate", "--law", "atom-gap", "--n", "500", "--replicates", "6", "--seed", "9", "--parallel", "1"]
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert cli.main(args + ["--out", str(a)]) == 0
    assert cli.main(args + ["--out", str(b)]) == 0
    assert _strip_ts(a.read_text()) == _strip_ts(b.read_text())


def test_parallel_matches_serial(tmp_path):
    base = ["simulate", "--law", "beta23", "--n", "300", "--replicates", "10", "--seed", "4"]
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    cli.main(base + ["--parallel", "1", "--out", str(a)])
    cli.main(base + ["--parallel", "2", "--out", str(b)])
    assert _strip_ts(a.read_text()) == _strip_ts(b.read_text())


def test_resume(tmp_path):
    base = ["simulate", "--law", "atom-gap", "--n", "200", "--seed", "1", "--parallel", "1"]
    full, part = tmp_path / "full.jsonl", tmp_path / "part.jsonl"
    cli.main(base + ["--replicates", "5", "--out", str(full)])
    cli.main(base + ["--replicates", "2", "--out", str(part)])
    with open(part, "a") as fh:
        fh.write('{"torn": ')  # crash mid-write
    cli.main(base + ["--replicates", "5", "--out", str(part)])
    assert _strip_ts(full.read_text()) == _strip_ts(part.read_text())
    other = ["simulate", "--law", "rrt", "--n", "200", "--seed", "1", "--replicates", "5", "--out", str(part)]
    assert cli.main(other) == 2


def test_seed_env_fallback(tmp_path):
    import os

    env = dict(os.environ, WRTLAB_SEED="7")
    _, out_env, _ = run("simulate", "--law", "beta23", "--n", "50", "--parallel", "1", env=env)
    _, out_flag, _ = run("simulate", "--law", "beta23", "--n", "50", "--seed", "7", "--parallel", "1")
    assert _strip_ts(out_env) == _strip_ts(out_flag)


@pytest.mark.parametrize(
    "argv",
    [
        ["simulate", "--law", "rrt", "--n", "0"],
        ["simulate", "--law", "rrt", "--n", "5", "--replicates", "0"],
        ["simulate", "--law", "bogus", "--n", "5"],
        ["simulate", "--law", "rrt", "--n", "5", "--seed", "-3"],
        ["simulate", "--law", "rrt", "--n", "5", "--window", "3:1"],
        ["simulate", "--law", "rrt"],
        ["frobnicate"],
        ["predict", "--law", "rrt"],
    ],
)
def test_usage_errors_exit_2(argv):
    code, _, _ = run(*argv)
    assert code == 2


def test_schema_gate(tmp_path):
    rec = tmp_path / "r.jsonl"
    cli.main(["simulate", "--law", "rrt", "--n", "20", "--parallel", "1", "--out", str(rec)])
    d = json.loads(rec.read_text())
    d["schemaVersion"] = 99
    rec.write_text(json.dumps(d) + "\n")
    assert cli.main(["verify", str(rec)]) == 2
    empty = tmp_path / "e.jsonl"
    empty.write_text("")
    assert cli.main(["verify", str(empty)]) == 2
    assert cli.main(["verify", str(tmp_path / "missing.jsonl")]) == 2


def test_verify_no_window_overlap(tmp_path):
    rec = tmp_path / "r.jsonl"
    cli.main(["simulate", "--law", "atom-gap", "--n", "1000", "--replicates", "3", "--window", "0:2",
              "--parallel", "1", "--out", str(rec)])
    code, out, _ = run("verify", str(rec), "--window", "5:7")
    assert code == 1
    report = json.loads(out)
    assert not report["passed"]
    assert report["claims"][0]["detail"] == "no data in window"


def _synthetic_records(R, seed=0):
    law = PRESETS["atom-gap"]
    n = 10**5
    cen = asy.centering_for(law)
    rng = np.random.default_rng(seed)
    lo, hi = -5, 5
    means = np.array([asy.bucket_means(cen, n, i)[0] for i in range(lo, hi + 1)])
    recs = []
    for r in range(R):
        xi = rng.poisson(means)
        x_geq = np.cumsum(xi[::-1])[::-1]
        top = int(np.nonzero(xi)[0].max()) + lo
        summary = {
            "n": n, "floor_center": cen.floor_center(n), "eps_n": cen.eps_n(n), "window": [lo, hi],
            "xi": xi.tolist(), "x_geq": x_geq.tolist(), "max_degree": cen.floor_center(n) + top,
            "num_maximizers": int(xi[top - lo]),
        }
        recs.append(cli.RunRecord(law.to_dict(), n, "fixed", 0, r, summary["max_degree"],
                                  summary["num_maximizers"], n - 1, summary, ""))
    return recs


def test_verify_poisson_matched_synthetic():
    report = cli.verify_records(_synthetic_records(2000))
    fits = [c for c in report.claims if c.name.startswith("TV")]
    assert fits and all(c.passed for c in fits)
    means = [c for c in report.claims if c.name.startswith("mean X")]
    assert sum(c.passed for c in means) >= len(means) - 1


def test_verify_soft_for_non_atom(tmp_path):
    rec = tmp_path / "r.jsonl"
    cli.main(["simulate", "--law", "beta23", "--n", "2000", "--replicates", "4", "--parallel", "1", "--out", str(rec)])
    report = cli.verify_records(cli.load_records(str(rec)))
    assert all(not c.hard for c in report.claims)


def test_predict_beta():
    code, out, _ = run("predict", "--law", "beta23", "--n", "1000000")
    assert code == 0
    d = json.loads(out)
    assert d["second_order_limit"] == -3 and d["case"] == asy.BETA


def test_predict_gamma_fraction_and_rav():
    code, out, _ = run("predict", "--law", "gamma01", "--n", "100000")
    d = json.loads(out)
    assert code == 0 and {"C_theta_1_c1", "c_c1_b_theta"} <= set(d["constants"])
    code, out, _ = run("predict", "--law", '{"kind":"rav","tau":2,"c1":1,"theta":1.5}', "--n", "1000000")
    assert code == 0 and json.loads(out)["intensity_const"] is None


def test_table_rrt(tmp_path):
    code, out, _ = run("table", "--law", "rrt", "--k", "0:10")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["k", "pk_quadrature", "pk_closed", "pk_asymptotic", "lower_bound", "upper_bound"]
    assert [float(r["pk_quadrature"]) for r in rows] == [2.0 ** -(k + 1) for k in range(11)]


def test_oracle_commands():
    code, out, _ = run("oracle", "--weights", "1,0.5,0.5", "--targets", "0")
    assert code == 0
    table = dict((tuple(k), p) for k, p in json.loads(out)["table"])
    assert table[(2,)] == pytest.approx(2 / 3)
    code, out, _ = run("oracle", "--weights", "1,0.5,0.5", "--vertex", "0")
    assert json.loads(out)["pmf"] == pytest.approx([0, 1 / 3, 2 / 3])
    code, out, _ = run("oracle", "--law", "rrt", "--n", "100")
    assert code == 0 and json.loads(out)["replicates"] == 1
    assert run("oracle")[0] == 2
