import threading

import pytest

from app.model.harness.metrics import Metrics
from app.model.reporting.report_outcome import OutcomeKind, ReportOutcome
from app.services.metrics_sink import MetricsSink, summarize, write_metrics


def test_summary_of_samples():
    summary = summarize([4.0, 1.0, 3.0, 2.0])
    assert (summary.count, summary.p50, summary.max) == (4, 2.5, 4.0)
    assert summary.p95 == pytest.approx(3.85)
    assert summarize([]).model_dump() == {"count": 0, "p50": 0.0, "p95": 0.0, "max": 0.0}


def test_snapshot_collects_counters(metrics):
    metrics.increment("events.snapshot.published", 3)
    metrics.increment("channel.posted")
    metrics.increment("errors.backend")
    metrics.set_gauge("achieved_fps", 9.87654)
    metrics.record_outcome(ReportOutcome(snapshot_seq=1, outcome=OutcomeKind.TIMEOUT, latency_ms=60000.0))

    snapshot = metrics.snapshot()
    assert snapshot.events["snapshot"].published == 3
    assert snapshot.channel["posted"] == 1
    assert snapshot.errors["backend"] == 1
    assert snapshot.report_outcomes == {"delivered": 0, "timeout": 1, "dropped": 0, "llm_error": 0}
    assert snapshot.report_latency_ms.max == 60000.0
    assert metrics.outcomes()[0].snapshot_seq == 1


def test_rendering(metrics):
    metrics.increment("frames_processed", 400)
    metrics.set_gauge("achieved_fps", 10.0)
    metrics.record_outcome(ReportOutcome(snapshot_seq=1, outcome=OutcomeKind.DELIVERED, latency_ms=500.0))

    lines = metrics.snapshot().to_lines()
    records = lines[:lines.index("# summary")]
    assert records == sorted(records)
    assert "frames_processed=400" in records
    assert "achieved_fps=10.000" in records
    assert "report_latency_ms.p95=500.000" in records
    assert "report.delivered=1" in records
    assert lines[-3:] == ["frames=400 fps=10.000 snapshots=0 reports=0",
                          "delivered=1 timeout=0 dropped=0 llm_error=0",
                          "report_latency_ms p50=500.000 p95=500.000 max=500.000"]


def test_every_known_metric_is_rendered():
    keys = {line.split("=")[0] for line in Metrics().to_lines() if "=" in line and not line.startswith(("#", "frames"))}
    assert set(Metrics().flatten()) <= keys
    assert "events.command.rejected" in keys
    assert "errors.snapshot_write" in keys


def test_conservation_holds_for_a_consistent_run():
    metrics = Metrics(triggers=3,
                      events={"snapshot": {"published": 3}, "report": {"published": 2}},
                      report_outcomes={"delivered": 2, "timeout": 1, "dropped": 0, "llm_error": 0},
                      channel={"posted": 1, "fallback": 1, "send_failed": 0, "direct_posted": 0})
    assert metrics.conservation_violations(reporting_enabled=True) == []


def test_conservation_violations_are_described():
    metrics = Metrics(triggers=4,
                      events={"snapshot": {"published": 3}, "report": {"published": 2}},
                      report_outcomes={"delivered": 1, "timeout": 0, "dropped": 0, "llm_error": 0},
                      channel={"posted": 0, "fallback": 0, "send_failed": 0, "direct_posted": 0})
    violations = metrics.conservation_violations(reporting_enabled=True)
    assert len(violations) == 4
    assert violations[0].startswith("triggers 4")
    assert len(metrics.conservation_violations(reporting_enabled=False)) == 3


def test_concurrent_increments_are_not_lost():
    sink = MetricsSink()

    def work():
        for _ in range(1000):
            sink.increment("frames_processed")
            sink.observe("dispatch_latency_us", 1.0)

    threads = [threading.Thread(target=work) for _ in range(8)]
    for thread in threads:
        thread.start()
    for thread in threads:
        thread.join()

    assert sink.count("frames_processed") == 8000
    assert sink.snapshot().dispatch_latency_us.count == 8000


def test_write_metrics_creates_the_directory(tmp_path):
    path = write_metrics(Metrics(), tmp_path / "out" / "metrics.txt")
    assert path.read_text().endswith("report_latency_ms p50=0.000 p95=0.000 max=0.000\n")
