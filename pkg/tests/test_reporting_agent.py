from pathlib import Path

import pytest

from app.model.exceptions.llm_exceptions import (EmptyCaptionException, LlmTimeoutException,
                                                 LlmUnavailableException)
from app.model.harness.run_config import ReportingConfig
from app.model.reporting.config_args import ConfigArgs
from app.model.reporting.report_outcome import OutcomeKind
from app.model.router.event import DeliveryMode
from app.model.runtime_constants import AgentNames, EventTypes
from app.model.vision.bbox import BBox
from app.model.vision.detection import Detection
from app.services.agents.report_workers import SimulatedReportWorkers, ThreadedReportWorkers
from app.services.agents.reporting_agent import (ReportingAgent, build_prompt, format_args, generate_caption,
                                                 summarize_detections)
from app.services.clock import Deadline, SystemClock
from app.services.llm.mock_llm_client import MockLlmClient
from app.services.message_router import MessageRouter
from app.services.simulation_scheduler import SimulationScheduler

PERSON = Detection(box=BBox.of(0, 0, 10, 10), label="person", confidence=0.91)


def snapshot_event(router, snapshot_dir, index=1, **payload):
    path = snapshot_dir / f"snap_{index}_1.png"
    path.write_bytes(b"png")
    values = {"path": path, "detections": [PERSON], "timestamp": 0.0,
              "args": ConfigArgs(entries={"theta": 0.3, "labels": ["person"]})}
    values.update(payload)
    return router.make_event(EventTypes.SNAPSHOT, values)


def make_agent(router, clock, client=None, **config) -> ReportingAgent:
    agent = ReportingAgent(router, client if client is not None else MockLlmClient(),
                           ReportingConfig(client="mock", **config), clock)
    agent.attach()
    return agent


def reports_of(router) -> list:
    reports = []
    listener = router.register_agent("listener", reports.append)
    router.subscribe(listener, EventTypes.REPORT, DeliveryMode.INLINE)
    return reports


def test_format_args_is_sorted_and_flat():
    args = ConfigArgs(entries={"theta": 0.3, "labels": ["car", "person"], "preview": False, "detector": "synthetic"})
    assert format_args(args) == "detector=synthetic; labels=car,person; preview=false; theta=0.3"
    assert format_args(ConfigArgs()) == ""


def test_summarize_detections():
    car = Detection(box=BBox.of(0, 0, 5, 5), label="car", confidence=0.8)
    other = Detection(box=BBox.of(5, 5, 9, 9), label="person", confidence=0.6)
    assert summarize_detections([PERSON, car, other]) == "car x1 (max conf 0.80), person x2 (max conf 0.91)"
    assert summarize_detections([]) == "no objects"


def test_prompt_carries_detections_time_and_args():
    prompt = build_prompt(Path("snap_1_1.png"), [PERSON], 5.0, "theta=0.3")
    assert "1970-01-01T00:00:05.000+00:00" in prompt
    assert "person x1 (max conf 0.91)" in prompt
    assert "theta=0.3" in prompt
    assert "defaults" in build_prompt(Path("snap_1_1.png"), [], 0.0, "")


def test_generate_caption_with_mock(clock):
    caption = generate_caption(Path("snap.png"), [PERSON], 5.0, "", MockLlmClient(delay_s=2), Deadline(clock, 60))
    assert caption.startswith("ALERT: person x1 (max conf 0.91) at 1970-01-01T00:00:05.000+00:00")
    assert clock.now() == 2.0


def test_unavailable_is_retried_once(clock):
    client = MockLlmClient(failures=["unavailable"])
    assert generate_caption(Path("s.png"), [PERSON], 0.0, "", client, Deadline(clock, 60)).startswith("ALERT")
    assert client.calls == 2
    assert clock.now() == 1.0

    client = MockLlmClient(failures=["unavailable", "unavailable"])
    with pytest.raises(LlmUnavailableException):
        generate_caption(Path("s.png"), [PERSON], 0.0, "", client, Deadline(clock, 60))


def test_timeout_is_not_retried(clock):
    client = MockLlmClient(delay_s=70)
    with pytest.raises(LlmTimeoutException):
        generate_caption(Path("s.png"), [PERSON], 0.0, "", client, Deadline(clock, 60))
    assert client.calls == 1
    assert clock.now() == 60.0


def test_empty_caption_is_an_error(clock):
    with pytest.raises(EmptyCaptionException):
        generate_caption(Path("s.png"), [PERSON], 0.0, "", MockLlmClient(failures=["empty"]), Deadline(clock, 60))


def test_prompt_is_capped(clock):
    seen = []

    class Recording(MockLlmClient):
        def generate(self, request, deadline):
            seen.append(request)
            return super().generate(request, deadline)

    generate_caption(Path("s.png"), [PERSON], 0.0, "x" * 5000, Recording(), Deadline(clock, 60), prompt_cap=100)
    assert len(seen[0].prompt) == 100


def test_delivered_report_carries_path_and_caption(router, clock, snapshot_dir):
    reports = reports_of(router)
    agent = make_agent(router, clock)
    event = snapshot_event(router, snapshot_dir)
    router.send_to_agent(AgentNames.ROUTER, event)
    router.dispatch_pending()

    queued = agent.queue.poll()
    outcome = agent.complete(agent.resolve(queued, clock.fork()))
    router.dispatch_pending()

    assert outcome.outcome is OutcomeKind.DELIVERED
    report, = reports
    assert set(report.payload) == {"path", "caption"}
    assert report.payload["path"] == event.payload["path"]
    assert report.payload["caption"].startswith("ALERT:")
    assert agent.dispatch_context_calls == 0


@pytest.mark.parametrize("options, kind", [
    ({"delay_s": 90}, OutcomeKind.TIMEOUT),
    ({"failures": ["error"]}, OutcomeKind.LLM_ERROR),
    ({"failures": ["empty"]}, OutcomeKind.LLM_ERROR),
    ({"failures": ["unavailable", "unavailable"]}, OutcomeKind.LLM_ERROR),
])
def test_failed_generation_outcomes(router, clock, snapshot_dir, options, kind):
    reports = reports_of(router)
    agent = make_agent(router, clock, MockLlmClient(**options))
    router.send_to_agent(AgentNames.ROUTER, snapshot_event(router, snapshot_dir))
    router.dispatch_pending()

    outcome = agent.handle_snapshot_event(agent.queue.poll())
    router.dispatch_pending()

    assert outcome.outcome is kind
    assert reports == []
    assert router.metrics.count(f"report.{kind.value}") == 1


def test_timeout_latency_is_the_deadline(router, clock, snapshot_dir):
    agent = make_agent(router, clock, MockLlmClient(delay_s=70), deadline_s=60)
    router.send_to_agent(AgentNames.ROUTER, snapshot_event(router, snapshot_dir))
    router.dispatch_pending()
    outcome = agent.handle_snapshot_event(agent.queue.poll())
    assert outcome.latency_ms == 60000.0


def test_malformed_payload_is_an_llm_error(router, clock):
    agent = make_agent(router, clock)
    event = router.make_event(EventTypes.SNAPSHOT, {"timestamp": 1.0})
    assert agent.handle_snapshot_event(event).outcome is OutcomeKind.LLM_ERROR


def test_queue_overflow_is_recorded_as_dropped(router, clock, snapshot_dir):
    agent = make_agent(router, clock, queue_cap=2)
    for index in range(5):
        router.send_to_agent(AgentNames.ROUTER, snapshot_event(router, snapshot_dir, index))
    router.dispatch_pending()

    assert agent.pending() == 2
    assert router.metrics.count("report.dropped") == 3


def test_full_router_turns_delivery_into_drop(clock, metrics, snapshot_dir):
    router = MessageRouter(clock, metrics, queue_capacity=1, snapshot_dir=snapshot_dir)
    agent = make_agent(router, clock)
    router.send_to_agent(AgentNames.ROUTER, snapshot_event(router, snapshot_dir))
    router.dispatch_pending()
    event = agent.queue.poll()

    router.send_to_agent(AgentNames.ROUTER, router.make_event(EventTypes.STATUS, {}))
    assert agent.complete(agent.resolve(event, clock)).outcome is OutcomeKind.DROPPED


def test_configure_switches_the_model(router, clock, snapshot_dir):
    requests = []

    class Recording(MockLlmClient):
        def generate(self, request, deadline):
            requests.append(request)
            return super().generate(request, deadline)

    agent = make_agent(router, clock, Recording())
    router.send_to_agent(AgentNames.ROUTER, router.make_event(EventTypes.COMMAND,
                                                              {"action": "configure", "model": "qwen2.5:0.5b"}))
    router.send_to_agent(AgentNames.ROUTER, snapshot_event(router, snapshot_dir))
    router.dispatch_pending()
    agent.handle_snapshot_event(agent.queue.poll())

    assert requests[0].model == "qwen2.5:0.5b"


def test_resolving_on_the_dispatch_context_is_counted(router, clock, snapshot_dir):
    agent = make_agent(router, clock)
    event = snapshot_event(router, snapshot_dir)
    probe = router.register_agent("probe", lambda _: agent.resolve(event, clock))
    router.subscribe(probe, EventTypes.STATUS, DeliveryMode.INLINE)
    router.send_to_agent(AgentNames.ROUTER, router.make_event(EventTypes.STATUS, {}))
    router.dispatch_pending()
    assert agent.dispatch_context_calls == 1


def test_simulated_workers_respect_max_in_flight(router, clock, snapshot_dir):
    scheduler = SimulationScheduler(clock)
    agent = make_agent(router, clock, MockLlmClient(delay_s=10), max_in_flight=2, queue_cap=10)
    workers = SimulatedReportWorkers(agent, 2, scheduler, clock)
    for index in range(5):
        router.send_to_agent(AgentNames.ROUTER, snapshot_event(router, snapshot_dir, index))
    router.dispatch_pending()

    assert workers.pump() == 2
    assert agent.in_flight == 2
    scheduler.run_until(100, after_each=workers.pump)

    assert router.metrics.count("report.delivered") == 5
    assert clock.now() == 30.0
    assert agent.in_flight == 0


def test_simulated_workers_drop_what_misses_the_drain_window(router, clock, snapshot_dir):
    scheduler = SimulationScheduler(clock)
    agent = make_agent(router, clock, MockLlmClient(delay_s=40), queue_cap=10)
    workers = SimulatedReportWorkers(agent, 1, scheduler, clock)
    for index in range(4):
        router.send_to_agent(AgentNames.ROUTER, snapshot_event(router, snapshot_dir, index))
    router.dispatch_pending()

    workers.pump()
    workers.stop(60)
    scheduler.run_until(1000, after_each=workers.pump)
    workers.finish()

    # jobs start at 0 and 40, the one ready at 80 is past the window
    assert router.metrics.count("report.delivered") == 2
    assert router.metrics.count("report.dropped") == 2


def test_threaded_workers_report_and_drain(snapshot_dir, metrics):
    router = MessageRouter(SystemClock(), metrics, snapshot_dir=snapshot_dir)
    agent = ReportingAgent(router, MockLlmClient(), ReportingConfig(client="mock", queue_cap=10), SystemClock())
    agent.attach()
    for index in range(3):
        router.send_to_agent(AgentNames.ROUTER, snapshot_event(router, snapshot_dir, index))
    router.dispatch_pending()

    workers = ThreadedReportWorkers(agent, 2)
    workers.start()
    workers.stop(drain_s=5)

    assert sum(metrics.count(f"report.{kind.value}") for kind in OutcomeKind) == 3
    assert metrics.count("report.delivered") + metrics.count("report.dropped") == 3

