import csv
import json
import subprocess
import sys

import pytest

from cubic_twists.cli import run


def read(out, command):
    lines = (out / f"{command}.csv").read_text().splitlines()
    assert lines[0].startswith("# manifest ")
    return list(csv.reader(lines[1:]))


def test_enumerate_characters(tmp_path):
    assert run(["enumerate-characters", "--max-conductor", "7", "--out", str(tmp_path)]) == 0
    rows = read(tmp_path, "enumerate-characters")
    assert rows[0][:3] == ["conductor", "generator_a", "generator_b"]
    assert [r[0] for r in rows[1:]] == ["7", "7"]
    man = json.loads((tmp_path / "enumerate-characters.manifest.json").read_text())
    assert man["command"] == "enumerate-characters" and man["seed"] == 0


def test_lvalue_zeta_two(tmp_path):
    assert run(["lvalue", "--s", "2", "--conductor", "1", "--out", str(tmp_path)]) == 0
    rows = read(tmp_path, "lvalue")
    rec = dict(zip(rows[0], rows[1]))
    assert float(rec["value_re"]) == pytest.approx(1.6449340668482264, rel=1e-10)


def test_sieve_test_reproducible(tmp_path):
    args = ["sieve-test", "--M", "16,32", "--Q", "16", "--trials", "5", "--seed", "3"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(args + ["--out", str(a)]) == 0
    assert run(args + ["--out", str(b)]) == 0
    assert (a / "sieve-test.csv").read_bytes() == (b / "sieve-test.csv").read_bytes()


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"max_conductor": 50}))
    assert run(["enumerate-characters", "--config", str(cfg), "--max-conductor", "7", "--out", str(tmp_path)]) == 0
    assert len(read(tmp_path, "enumerate-characters")) == 3


def test_exit_codes(tmp_path):
    out = ["--out", str(tmp_path)]
    assert run(["first-moment", "--r1", "0.5", "--r2", "0.6", "--Q-list", "20"] + out) == 2
    assert run(["lvalue", "--s", "1", "--conductor", "1"] + out) == 3
    assert run(["enumerate-characters"] + out) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    assert run(["census", "--config", str(bad)] + out) == 2


def test_census_and_gauss_sums(tmp_path):
    assert run(["census", "--s", "1.2", "--provider", "zeta", "--Q", "20", "--out", str(tmp_path)]) == 0
    assert len(read(tmp_path, "census")) >= 2
    assert run(["gauss-sums", "--max-conductor", "13", "--out", str(tmp_path)]) == 0
    assert len(read(tmp_path, "gauss-sums")) == 5


def test_cache_commands(tmp_path):
    cache = tmp_path / "cache"
    base = ["--cache", str(cache), "--out", str(tmp_path)]
    assert run(["cache", "build", "--p-max", "500"] + base) == 0
    assert any(cache.iterdir())
    assert run(["cache", "inspect"] + base) == 0
    assert run(["cache", "clear"] + base) == 0
    assert not any(cache.glob("*.csv"))


def test_console_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "cubic_twists.cli", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip()
