import json
import os
import subprocess
import sys


from mpp.cli import main
from mpp.report import from_csv, from_json


def test_verify_json(capsys):
    code = main(["verify", "--generator", "rademacher", "--depth", "6", "--p", "2", "--q", "2",
                 "--rho", "1.5", "--lambda", "1", "--seed", "7", "--format", "json"])
    assert code == 0
    reports = from_json(capsys.readouterr().out)
    ids = {r.inequality_id for r in reports}
    assert {"doob", "weighted_bdg", "thm_variation", "gundy_good_sup"} <= ids


def test_oracle_depth_8(capsys):
    assert main(["oracle", "--depth", "8"]) == 0
    reports = from_csv(capsys.readouterr().out)
    assert reports and all(r.passed and r.lhs == 0 for r in reports)


def test_missing_depth_is_a_config_error(capsys):
    assert main(["scan", "--generator", "random"]) == 2
    assert "depth" in capsys.readouterr().err


def test_oracle_depth_guard(capsys):
    assert main(["oracle", "--depth", "15"]) == 2
    assert "depth" in capsys.readouterr().err


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"command": "scan", "depth": 3, "seed": [1, 2], "rho": [1.5, 2.5]}))
    assert main(["scan", "--config", str(cfg), "--rho", "3"]) == 0
    reports = from_csv(capsys.readouterr().out)
    assert {r.seed for r in reports} == {1, 2}
    assert {r.rho for r in reports if r.rho is not None} == {3.0}


def test_config_file_errors_name_the_field(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"depht": 3}))
    assert main(["scan", "--config", str(cfg)]) == 2
    assert "depht" in capsys.readouterr().err
    cfg.write_text(json.dumps({"depth": 3, "p": []}))
    assert main(["scan", "--config", str(cfg)]) == 2
    assert "p:" in capsys.readouterr().err


def test_verify_rejects_grids(capsys):
    assert main(["verify", "--depth", "3", "--p", "2", "3"]) == 2


def test_decompose_and_search(tmp_path, capsys):
    assert main(["decompose", "--depth", "5", "--seeds", "1", "2"]) == 0
    reports = from_csv(capsys.readouterr().out)
    assert len(reports) == 2 * 3 * 4
    trace = tmp_path / "trace.csv"
    out = tmp_path / "best.csv"
    assert main(["search", "--depth", "4", "--target", "doob", "--p", "3", "--iterations", "30",
                 "--restarts", "2", "--trace", str(trace), "--output", str(out)]) == 0
    assert trace.read_text().startswith("restart,iteration,ratio,accepted\n")
    assert from_csv(out.read_text())[0].inequality_id == "doob"
    assert main(["search", "--depth", "3", "--target", "nope"]) == 2


def test_space_file_generator(tmp_path, capsys, rng):
    from mpp.generators import random_martingale, random_space
    from mpp.io import save_space

    space = random_space(4, 12, rng)
    path = tmp_path / "s.json"
    save_space(path, space, {"f": random_martingale(space, rng), "g": random_martingale(space, rng)})
    assert main(["verify", "--generator", "space", "--space", str(path)]) == 0
    assert len(from_csv(capsys.readouterr().out)) > 10


def test_scan_is_byte_identical_across_thread_counts(tmp_path):
    outputs = []
    for threads in ("1", "3"):
        out = tmp_path / f"scan{threads}.csv"
        env = {**os.environ, "MPP_THREADS": threads}
        subprocess.run([sys.executable, "-m", "mpp.cli", "scan", "--depth", "4", "--seeds", "1", "2", "3",
                        "--rho", "1.5", "2.5", "--lambda", "0.5", "1", "--output", str(out)],
                       env=env, check=True)
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
