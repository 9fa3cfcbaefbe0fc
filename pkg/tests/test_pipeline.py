import json
from pathlib import Path

import numpy as np
import pytest

from embtrace import demo, pipeline
from embtrace.arrays import read_array, write_array
from embtrace.errors import ParameterError
from embtrace.model import Manifest, load_bundle


def _tree_bytes(root: Path) -> dict:
    return {
        str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()
    }


def _tree_mtimes(root: Path) -> dict:
    return {
        str(p.relative_to(root)): p.stat().st_mtime_ns
        for p in sorted(root.rglob("*"))
        if p.is_file()
    }


def _fresh_line4(tmp_path) -> Path:
    out = tmp_path / "line4"
    demo.write_line4_bundle(out)
    return out


def test_config_validation():
    config = pipeline.PrecomputeConfig(k_list=(50, 10, 10))
    assert config.k_list == (10, 50)
    assert config.kmax == 50
    with pytest.raises(ParameterError):
        pipeline.PrecomputeConfig(k_list=())
    with pytest.raises(ParameterError):
        pipeline.PrecomputeConfig(k_list=(0, 5))
    with pytest.raises(ParameterError):
        pipeline.PrecomputeConfig(seed=-1)
    with pytest.raises(ParameterError):
        pipeline.PrecomputeConfig(triplets_per_point=0)


def test_line4_column_inventory(line4_ready_dir):
    manifest = Manifest.load(line4_ready_dir)
    per_embedding = {"line": [], "scrambled": [], None: []}
    for col in manifest.columns:
        per_embedding[col["embedding"]].append(col["metric_name"])
    for name in ("line", "scrambled"):
        assert per_embedding[name] == [
            "neighborhood_preservation",
            "triplet_accuracy",
            "distance_rank_correlation",
        ]
    assert per_embedding[None] == ["point_stability"]
    assert len(manifest.columns) == 7

    for col in manifest.columns:
        path = manifest.resolve(manifest.metrics_dir) / col["path"]
        assert path.exists(), col
        values = read_array(path)
        assert values.shape == (4, 1)
        assert col["vmin"] <= values.min() and values.max() <= col["vmax"]


def test_line4_values_match_metric_module(line4_ready_dir):
    manifest = Manifest.load(line4_ready_dir)
    metrics_root = manifest.resolve(manifest.metrics_dir)
    pres = read_array(metrics_root / "scrambled/neighborhood_preservation_k1.f32")
    np.testing.assert_array_equal(pres[:, 0], [0.0, 0.0, 0.0, 1.0])
    pres_line = read_array(metrics_root / "line/neighborhood_preservation_k1.f32")
    np.testing.assert_array_equal(pres_line[:, 0], 1.0)
    # n=4 keeps every other point in each neighbor set at the stability k floor
    stab = read_array(metrics_root / f"point_stability_k{3}.f32")
    np.testing.assert_array_equal(stab[:, 0], 1.0)


def test_idempotent_rerun(tmp_path):
    out = _fresh_line4(tmp_path)
    config = pipeline.PrecomputeConfig(k_list=(1,))
    pipeline.precompute(load_bundle(out), config)
    bytes_before = _tree_bytes(out)
    mtimes_before = _tree_mtimes(out)

    pipeline.precompute(load_bundle(out), config)
    assert _tree_bytes(out) == bytes_before
    mtimes_after = _tree_mtimes(out)
    unchanged = {k for k in mtimes_before if mtimes_before[k] == mtimes_after[k]}
    # only the manifest is rewritten (atomically, with identical bytes)
    assert set(mtimes_before) - unchanged <= {"trace.json"}


def test_force_recomputes_same_bytes(tmp_path):
    out = _fresh_line4(tmp_path)
    config = pipeline.PrecomputeConfig(k_list=(1,))
    pipeline.precompute(load_bundle(out), config)
    bytes_before = _tree_bytes(out)
    mtimes_before = _tree_mtimes(out)

    pipeline.precompute(load_bundle(out), pipeline.PrecomputeConfig(k_list=(1,), force=True))
    assert _tree_bytes(out) == bytes_before
    mtimes_after = _tree_mtimes(out)
    cache_files = [k for k in mtimes_before if k.startswith("cache/metrics/")]
    changed = [k for k in cache_files if mtimes_after[k] != mtimes_before[k]]
    assert changed, "force run should rewrite cache files"


def test_single_embedding_no_stability(tmp_path):
    out = tmp_path / "solo"
    hd = np.arange(12, dtype=np.float32).reshape(6, 2)
    demo.write_bundle(
        out,
        name="solo",
        hd_points=hd,
        embeddings=[("only", hd)],
        metadata_header=["x"],
        metadata_rows=[[str(i)] for i in range(6)],
        k_list=[2],
        seed=1,
    )
    manifest = pipeline.precompute(load_bundle(out), pipeline.PrecomputeConfig(k_list=(2,)))
    names = [col["metric_name"] for col in manifest.columns]
    assert "point_stability" not in names
    assert len(manifest.columns) == 3


def test_infeasible_k_skipped_with_warning(tmp_path):
    out = _fresh_line4(tmp_path)
    manifest = pipeline.precompute(
        load_bundle(out), pipeline.PrecomputeConfig(k_list=(1, 10))
    )
    warnings = manifest.precompute["warnings"]
    assert any(w["kind"] == "k_skipped" and w["k"] == 10 for w in warnings)
    pres_ks = [
        col["params"]["k"]
        for col in manifest.columns
        if col["metric_name"] == "neighborhood_preservation"
    ]
    assert pres_ks == [1, 1]


def test_status_lifecycle(tmp_path):
    out = _fresh_line4(tmp_path)
    manifest = Manifest.load(out)
    config = pipeline.PrecomputeConfig(k_list=(1,))

    fresh = pipeline.status(manifest, config)
    assert fresh["present"] == 0 and fresh["corrupt"] == 0
    assert all(row["state"] == "missing" for row in fresh["graphs"] + fresh["columns"])

    manifest = pipeline.precompute(load_bundle(out), config)
    done = pipeline.status(manifest)
    assert done["missing"] == 0 and done["corrupt"] == 0
    assert {row["state"] for row in done["columns"]} == {"present"}

    # deleting one descriptor flips exactly that column to missing
    victim = manifest.resolve(manifest.metrics_dir) / "line/triplet_accuracy_t500_s42.json"
    victim.unlink()
    after_delete = pipeline.status(manifest)
    flipped = [row for row in after_delete["columns"] if row["state"] != "present"]
    assert len(flipped) == 1
    assert flipped[0]["path"] == "line/triplet_accuracy_t500_s42.f32"
    assert flipped[0]["state"] == "missing"

    # garbage in a descriptor is reported as corrupt, not fatal
    victim.write_text("{broken")
    assert any(row["state"] == "corrupt" for row in pipeline.status(manifest)["columns"])


def test_status_uses_recorded_settings(tmp_path):
    out = _fresh_line4(tmp_path)
    pipeline.precompute(load_bundle(out), pipeline.PrecomputeConfig(k_list=(1,), seed=7))
    report = pipeline.status(Manifest.load(out))
    assert report["missing"] == 0
    assert any("s7" in row["path"] for row in report["columns"])


def test_missing_k_after_smaller_rerun(tmp_path):
    out = _fresh_line4(tmp_path)
    pipeline.precompute(load_bundle(out), pipeline.PrecomputeConfig(k_list=(1,)))
    report = pipeline.status(Manifest.load(out), pipeline.PrecomputeConfig(k_list=(1, 2)))
    missing = [row["path"] for row in report["columns"] if row["state"] == "missing"]
    assert missing == [
        "line/neighborhood_preservation_k2.f32",
        "scrambled/neighborhood_preservation_k2.f32",
    ]


def test_precompute_requires_manifest(line4_hd):
    from embtrace.model import DatasetBundle, Embedding

    bundle = DatasetBundle(
        name="x",
        hd_points=line4_hd,
        embeddings=[Embedding("e", np.zeros((4, 2), dtype=np.float32))],
    )
    with pytest.raises(ParameterError, match="manifest"):
        pipeline.precompute(bundle, pipeline.PrecomputeConfig(k_list=(1,)))
