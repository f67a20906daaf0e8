"""
    Shared fixtures
"""
from pathlib import Path

import pytest

from app.model.harness.run_config import RunConfig
from app.services.clock import SimulatedClock
from app.services.message_router import MessageRouter
from app.services.metrics_sink import MetricsSink

ROOT = Path(__file__).parent.parent
GOLDEN_DIR = Path(__file__).parent / "golden"
SCENARIO_DIR = ROOT / "scenarios"
SCRIPT_DIR = SCENARIO_DIR / "scripts"


@pytest.fixture
def clock() -> SimulatedClock:
    return SimulatedClock(0.0)


@pytest.fixture
def metrics() -> MetricsSink:
    return MetricsSink()


@pytest.fixture
def snapshot_dir(tmp_path) -> Path:
    path = tmp_path / "snapshots"
    path.mkdir()
    return path


@pytest.fixture
def router(clock, metrics, snapshot_dir) -> MessageRouter:
    return MessageRouter(clock, metrics, snapshot_dir=snapshot_dir)


def make_config(tmp_path : Path, **sections) -> RunConfig:
    """
        Synthetic dweller on a mock channel with outputs under tmp_path,
        sections override whole config sections by dict
    """
    values = {
        "backend": {"kind": "synthetic", "path": SCRIPT_DIR / "dweller.conf"},
        "channel": {"kind": "mock"},
        "reporting": {"client": "mock"},
        "run": {"snapshot_dir": tmp_path / "snapshots", "metrics_out": tmp_path / "metrics.txt"},
    }
    for section, overrides in sections.items():
        values[section] = values.get(section, {}) | overrides
    return RunConfig.model_validate(values)
