"""
    Per-run metrics and their line-delimited rendering
"""
from pydantic import BaseModel

from app.model.reporting.report_outcome import OutcomeKind
from app.model.runtime_constants import EventTypes


ERROR_KINDS : tuple[str, ...] = (
    "backend",
    "channel_send",
    "handler_error",
    "queue_full",
    "snapshot_write",
)

CHANNEL_OUTCOMES : tuple[str, ...] = ("posted", "fallback", "send_failed", "direct_posted")


class LatencySummary(BaseModel):
    """
        Quantiles of a latency sample set
    """

    count : int = 0
    p50 : float = 0.0
    p95 : float = 0.0
    max : float = 0.0


class EventCounters(BaseModel):
    """
        Router counters for one event type
    """

    published : int = 0
    delivered : int = 0
    dropped : int = 0
    rejected : int = 0
    handler_errors : int = 0


class Metrics(BaseModel):
    """
        Snapshot of everything the run measured
    """

    frames_processed : int = 0
    achieved_fps : float = 0.0
    triggers : int = 0
    commands_processed : int = 0
    events : dict[str, EventCounters] = {name: EventCounters() for name in EventTypes.ALL}
    report_outcomes : dict[str, int] = {kind.value: 0 for kind in OutcomeKind}
    report_latency_ms : LatencySummary = LatencySummary()
    dispatch_latency_us : LatencySummary = LatencySummary()
    reply_latency_ms : LatencySummary = LatencySummary()
    channel : dict[str, int] = {name: 0 for name in CHANNEL_OUTCOMES}
    errors : dict[str, int] = {name: 0 for name in ERROR_KINDS}
    report_contract_violations : int = 0

    def flatten(self) -> dict[str, float]:
        """
            Dotted metric names to values, the names assertions refer to
        """
        values : dict[str, float] = {
            "frames_processed": self.frames_processed,
            "achieved_fps": self.achieved_fps,
            "triggers": self.triggers,
            "commands_processed": self.commands_processed,
            "audit.report_contract_violations": self.report_contract_violations,
        }

        for event_type, counters in self.events.items():
            for name, value in counters.model_dump().items():
                values[f"events.{event_type}.{name}"] = value

        for kind, count in self.report_outcomes.items():
            values[f"report.{kind}"] = count

        for prefix, summary in (("report_latency_ms", self.report_latency_ms),
                                ("dispatch_latency_us", self.dispatch_latency_us),
                                ("reply_latency_ms", self.reply_latency_ms)):
            for name, value in summary.model_dump().items():
                values[f"{prefix}.{name}"] = value

        for name, count in self.channel.items():
            values[f"channel.{name}"] = count

        for name, count in self.errors.items():
            values[f"errors.{name}"] = count

        return values

    def conservation_violations(self, reporting_enabled : bool) -> list[str]:
        """
            Check the pipeline conservation identities
            :return: a description of every identity that does not hold
        """
        violations = []
        snapshot = self.events["snapshot"]
        report = self.events["report"]

        expected_triggers = snapshot.published + snapshot.rejected + self.errors["snapshot_write"]
        if self.triggers != expected_triggers:
            violations.append(f"triggers {self.triggers} != snapshots published/rejected/unwritten {expected_triggers}")

        if reporting_enabled:
            outcomes = sum(self.report_outcomes.values())
            if outcomes != snapshot.published:
                violations.append(f"report outcomes {outcomes} != snapshots published {snapshot.published}")

        if self.report_outcomes["delivered"] != report.published:
            violations.append(f"delivered outcomes {self.report_outcomes['delivered']} "
                              f"!= report events {report.published}")

        channel_total = self.channel["posted"] + self.channel["fallback"] + self.channel["send_failed"]
        if channel_total != report.published:
            violations.append(f"channel outcomes {channel_total} != report events {report.published}")

        return violations

    def to_lines(self) -> list[str]:
        """
            Render as sorted key=value records followed by the summary block
        """
        lines = [f"{key}={format_value(value)}" for key, value in sorted(self.flatten().items())]

        lines.append("# summary")
        lines.append(f"frames={self.frames_processed} fps={self.achieved_fps:.3f} "
                     f"snapshots={self.events['snapshot'].published} reports={self.events['report'].published}")
        lines.append(" ".join(f"{kind}={count}" for kind, count in self.report_outcomes.items()))
        lines.append(f"report_latency_ms p50={self.report_latency_ms.p50:.3f} "
                     f"p95={self.report_latency_ms.p95:.3f} max={self.report_latency_ms.max:.3f}")
        return lines

    def render(self) -> str:
        return "\n".join(self.to_lines()) + "\n"


def format_value(value : float) -> str:
    if isinstance(value, int):
        return str(value)
    return f"{value:.3f}"
