"""
    Thread safe sink every agent records counters and latency samples into
"""
import logging
import threading
from collections import defaultdict
from pathlib import Path

import numpy as np

from app.model.harness.metrics import (CHANNEL_OUTCOMES, ERROR_KINDS, EventCounters, LatencySummary,
                                       Metrics)
from app.model.reporting.report_outcome import OutcomeKind, ReportOutcome
from app.model.runtime_constants import EventTypes


class MetricsSink:
    """
        Accepts concurrent appends. snapshot() builds the Metrics model
    """

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._counters : dict[str, int] = defaultdict(int)
        self._samples : dict[str, list[float]] = defaultdict(list)
        self._gauges : dict[str, float] = {}
        self._outcomes : list[ReportOutcome] = []

    def increment(self, name : str, amount : int = 1) -> None:
        with self._lock:
            self._counters[name] += amount

    def observe(self, name : str, value : float) -> None:
        with self._lock:
            self._samples[name].append(value)

    def set_gauge(self, name : str, value : float) -> None:
        with self._lock:
            self._gauges[name] = value

    def record_outcome(self, outcome : ReportOutcome) -> None:
        with self._lock:
            self._outcomes.append(outcome)
            self._counters[f"report.{outcome.outcome.value}"] += 1
            self._samples["report_latency_ms"].append(outcome.latency_ms)

    def count(self, name : str) -> int:
        with self._lock:
            return self._counters.get(name, 0)

    def gauge(self, name : str) -> float:
        with self._lock:
            return self._gauges.get(name, 0.0)

    def outcomes(self) -> list[ReportOutcome]:
        with self._lock:
            return list(self._outcomes)

    def snapshot(self) -> Metrics:
        """
            Build a Metrics model from the current counters
        """
        with self._lock:
            counters = dict(self._counters)
            samples = {name: list(values) for name, values in self._samples.items()}
            gauges = dict(self._gauges)

        events = {}
        for event_type in EventTypes.ALL:
            events[event_type] = EventCounters(**{
                name: counters.get(f"events.{event_type}.{name}", 0) for name in EventCounters.model_fields
            })

        return Metrics(
            frames_processed=counters.get("frames_processed", 0),
            achieved_fps=gauges.get("achieved_fps", 0.0),
            triggers=counters.get("triggers", 0),
            commands_processed=counters.get("commands_processed", 0),
            events=events,
            report_outcomes={kind.value: counters.get(f"report.{kind.value}", 0) for kind in OutcomeKind},
            report_latency_ms=summarize(samples.get("report_latency_ms", [])),
            dispatch_latency_us=summarize(samples.get("dispatch_latency_us", [])),
            reply_latency_ms=summarize(samples.get("reply_latency_ms", [])),
            channel={name: counters.get(f"channel.{name}", 0) for name in CHANNEL_OUTCOMES},
            errors={name: counters.get(f"errors.{name}", 0) for name in ERROR_KINDS},
            report_contract_violations=counters.get("audit.report_contract_violations", 0),
        )


def summarize(samples : list[float]) -> LatencySummary:
    """
        p50, p95 and max of a sample list, all zero when empty
    """
    if len(samples) == 0:
        return LatencySummary()

    p50, p95 = np.percentile(np.asarray(samples, dtype=float), [50, 95])
    return LatencySummary(count=len(samples), p50=float(p50), p95=float(p95), max=float(max(samples)))


def write_metrics(metrics : Metrics, path : Path) -> Path:
    """
        Flush the metrics report to path, creating its directory
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(metrics.render(), encoding="utf-8")
    logging.info("Metrics written to %s", path)
    return path
