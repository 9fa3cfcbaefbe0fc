import os

# must happen before anything imports numba: its thread-pool module snapshots
# the cap at import time, and the determinism tests need to flip between 1 and
# 8 workers on the same pool (keeping numba-importing entries out of pyproject
# filterwarnings matters for the same reason: pytest would import numba to
# resolve them before this file runs)
os.environ.setdefault("NUMBA_NUM_THREADS", "8")
# the builtin pool skips the TBB version probe and its warning noise
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

from pathlib import Path

import numpy as np
import pytest

from embtrace import demo, pipeline
from embtrace.model import load_bundle


@pytest.fixture(scope="session")
def line4_dir(tmp_path_factory) -> Path:
    """A fresh line4 dataset directory, never precomputed."""
    out = tmp_path_factory.mktemp("data") / "line4"
    demo.write_line4_bundle(out)
    return out


@pytest.fixture(scope="session")
def line4_ready_dir(tmp_path_factory) -> Path:
    """A line4 dataset directory after a full precompute run."""
    out = tmp_path_factory.mktemp("ready") / "line4"
    demo.write_line4_bundle(out)
    bundle = load_bundle(out)
    config = pipeline.PrecomputeConfig(k_list=(1,), seed=42)
    pipeline.precompute(bundle, config)
    return out


@pytest.fixture(scope="session")
def line4_hd() -> np.ndarray:
    return np.array([[0.0], [1.0], [2.0], [10.0]], dtype=np.float32)


@pytest.fixture(scope="session")
def line4_ld() -> np.ndarray:
    return np.array([[0.0, 0.0], [10.0, 0.0], [1.0, 0.0], [2.0, 0.0]], dtype=np.float32)
