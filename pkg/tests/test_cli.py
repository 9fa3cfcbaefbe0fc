import json
import socket

import numpy as np
import pytest
from click.testing import CliRunner

from embtrace import demo
from embtrace.cli import main
from embtrace.model import Manifest, load_bundle


@pytest.fixture
def runner():
    return CliRunner()


def test_gen_demo_fixture_line4(runner, tmp_path):
    out = tmp_path / "fix"
    result = runner.invoke(main, ["gen-demo", "--out", str(out), "--fixture", "line4"])
    assert result.exit_code == 0, result.output
    bundle = load_bundle(out)
    assert bundle.n == 4 and bundle.d == 1
    np.testing.assert_array_equal(bundle.hd_points[:, 0], [0, 1, 2, 10])


def test_gen_demo_deterministic(runner, tmp_path):
    args = ["--n", "60", "--d", "4", "--clusters", "3", "--seed", "9"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert runner.invoke(main, ["gen-demo", "--out", str(a)] + args).exit_code == 0
    assert runner.invoke(main, ["gen-demo", "--out", str(b)] + args).exit_code == 0
    files_a = sorted(p.relative_to(a) for p in a.rglob("*") if p.is_file())
    files_b = sorted(p.relative_to(b) for p in b.rglob("*") if p.is_file())
    assert files_a == files_b
    for rel in files_a:
        assert (a / rel).read_bytes() == (b / rel).read_bytes(), rel
    bundle = load_bundle(a)
    assert bundle.n == 60
    assert [e.name for e in bundle.embeddings] == ["projection", "scrambled"]
    assert bundle.metadata_column("cluster").kind == "categorical"


def test_precompute_and_status(runner, tmp_path):
    out = tmp_path / "data"
    demo.write_line4_bundle(out)
    result = runner.invoke(main, ["precompute", "--data", str(out)])
    assert result.exit_code == 0, result.stderr
    assert "present" in result.output
    assert "missing=0" in result.output

    status = runner.invoke(main, ["status", "--data", str(out)])
    assert status.exit_code == 0
    report = json.loads(status.output)
    assert report["missing"] == 0 and report["corrupt"] == 0


def test_precompute_missing_manifest(runner, tmp_path):
    result = runner.invoke(main, ["precompute", "--data", str(tmp_path / "nope")])
    assert result.exit_code == 1
    err = json.loads(result.stderr.strip().splitlines()[-1])
    assert err["error"] == "FileNotFoundError"


def test_precompute_k_override(runner, tmp_path):
    out = tmp_path / "data"
    demo.write_demo_bundle(out, n=40, d=3, clusters=2, seed=1)
    result = runner.invoke(main, ["precompute", "--data", str(out), "--k", "2,5"])
    assert result.exit_code == 0, result.stderr
    manifest = Manifest.load(out)
    ks = sorted(
        col["params"]["k"]
        for col in manifest.columns
        if col["metric_name"] == "neighborhood_preservation" and col["embedding"] == "projection"
    )
    assert ks == [2, 5]
    assert manifest.precompute["settings"]["k_list"] == [2, 5]


def test_env_var_fallback(runner, tmp_path, monkeypatch):
    out = tmp_path / "data"
    demo.write_line4_bundle(out)
    monkeypatch.setenv("TRACE_DATA", str(out))
    result = runner.invoke(main, ["precompute"])
    assert result.exit_code == 0, result.stderr


def test_bench_report(runner):
    result = runner.invoke(
        main,
        ["bench", "--n", "120", "--d", "4", "--embeddings", "2", "--k", "5", "--triplets", "20"],
    )
    assert result.exit_code == 0, result.stderr
    report = json.loads(result.output)
    assert report["n"] == 120 and report["d"] == 4 and report["embedding_count"] == 2
    assert report["cores"] >= 1
    stages = report["stages"]
    assert sorted(stages) == sorted(
        ["hd-knn", "ld-knn", "preservation", "triplets", "rank-correlation", "stability"]
    )
    assert all(v >= 0 for v in stages.values())
    assert report["total"] == pytest.approx(sum(stages.values()), abs=1e-9)


def test_bench_n_too_small(runner):
    result = runner.invoke(main, ["bench", "--n", "50", "--d", "4"])
    assert result.exit_code == 1
    err = json.loads(result.stderr.strip().splitlines()[-1])
    assert err["error"] == "ParameterError"


def test_serve_port_in_use(runner, tmp_path):
    out = tmp_path / "data"
    demo.write_line4_bundle(out)
    blocker = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    blocker.bind(("127.0.0.1", 0))
    blocker.listen(1)
    port = blocker.getsockname()[1]
    try:
        result = runner.invoke(
            main, ["serve", "--data", str(out), "--port", str(port), "--bind", "127.0.0.1"]
        )
        assert result.exit_code == 1
        err = json.loads(result.stderr.strip().splitlines()[-1])
        assert err["error"] == "OSError"
    finally:
        blocker.close()


def test_serve_bad_data_dir(runner, tmp_path):
    result = runner.invoke(main, ["serve", "--data", str(tmp_path / "nope")])
    assert result.exit_code == 1
