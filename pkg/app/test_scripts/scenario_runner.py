"""
    Runs scripted scenarios on the simulated clock and checks their assertions
"""
import logging
import math
import operator
from pathlib import Path

from app.model.harness.assertion_result import AssertionResult
from app.model.harness.metrics import Metrics
from app.model.harness.run_config import RunConfig
from app.model.harness.scenario import Scenario, ScenarioAssertion
from app.model.harness.scenario_results import ScenarioResults
from app.model.runtime_constants import AgentNames, EventTypes, RuntimeConstants as rc
from app.services.agents.report_workers import SimulatedReportWorkers
from app.services.channels.channel_adapter import ChannelAdapter
from app.services.clock import SimulatedClock
from app.services.metrics_sink import write_metrics
from app.services.simulation_scheduler import Priority, SimulationScheduler
from app.services.system import System, bootstrap

OPERATORS = {
    "==": operator.eq,
    "!=": operator.ne,
    ">=": operator.ge,
    "<=": operator.le,
    ">": operator.gt,
    "<": operator.lt,
}


def relocate_outputs(config : RunConfig, output_dir : Path) -> RunConfig:
    """
        Put the snapshot directory and the metrics file of a run under output_dir
    """
    run = config.run.model_copy(update={"snapshot_dir": output_dir / config.run.snapshot_dir.name,
                                        "metrics_out": output_dir / config.run.metrics_out.name})
    return config.model_copy(update={"run": run})


def evaluate_assertion(assertion : ScenarioAssertion, values : dict[str, float]) -> AssertionResult:
    observed = values[assertion.metric]
    target = values[assertion.target] if assertion.target in values else float(assertion.target)

    passed = OPERATORS[assertion.op](observed, target)
    return AssertionResult(assertion=assertion.describe(),
                           passed=passed,
                           observed={assertion.metric: observed, "target": target},
                           failure_reason="" if passed else f"observed {observed}, expected {assertion.op} {target}")


class ScenarioRunner:
    """
        Drives one scenario deterministically.

        Frames fire at k / frame_rate and scripted commands at their times,
        commands first when both fall on the same instant. After every
        callback the router and the reporting workers run until nothing is
        left to do. At the end the vision agent stops, queued reports may
        still start for one deadline, and what is left is recorded as dropped.
    """

    scenario : Scenario
    output_dir : Path | None

    def __init__(self, scenario : Scenario, output_dir : Path | None = None,
                 adapter : ChannelAdapter | None = None) -> None:
        self.scenario = scenario
        self.output_dir = output_dir
        self.adapter = adapter
        self.clock = SimulatedClock(0.0)
        self.scheduler = SimulationScheduler(self.clock)
        self.system : System | None = None
        self.workers : SimulatedReportWorkers | None = None

    def settle(self) -> None:
        """
            Dispatch and start report jobs until the system is quiet
        """
        system = self.system
        while True:
            dispatched = system.router.dispatch_pending().dispatched
            started = self.workers.pump() if self.workers is not None else 0
            if dispatched == 0 and started == 0 and system.router.pending() == 0:
                return

    def _frame(self, index : int, timestamp : float) -> None:
        vision = self.system.vision
        if vision.running:
            vision.process_frame(vision.make_frame(index, timestamp))

    def _schedule(self) -> None:
        scenario = self.scenario
        rate = scenario.config.vision.frame_rate

        for command in scenario.commands:
            if command.at > scenario.duration_s:
                logging.warning("Command %r at %.1fs is after the end of %s, skipped",
                                command.text, command.at, scenario.name)
                continue
            self.scheduler.schedule_at(command.at, Priority.COMMAND,
                                       lambda text=command.text: self.system.adapter.inject(text))

        index = 0
        while index / rate < scenario.duration_s - rc.TIME_EPSILON:
            timestamp = round(index / rate, 6)
            self.scheduler.schedule_at(timestamp, Priority.FRAME,
                                       lambda index=index, timestamp=timestamp: self._frame(index, timestamp))
            index += 1

    def run(self) -> Metrics:
        """
            Execute the scenario
            :return: the metrics of the run, also written to run.metrics_out
        """
        config = self.scenario.config
        if self.output_dir is not None:
            config = relocate_outputs(config, Path(self.output_dir))

        logging.info("Running scenario %s for %.1f virtual seconds", self.scenario.name, self.scenario.duration_s)
        self.system = bootstrap(config, self.clock, adapter=self.adapter, audit=True)
        if self.system.reporting is not None:
            self.workers = SimulatedReportWorkers(self.system.reporting, config.reporting.max_in_flight,
                                                  self.scheduler, self.clock)

        self._schedule()
        self.settle()
        self.scheduler.run_until(self.scenario.duration_s, after_each=self.settle)

        self.clock.advance_to(max(self.clock.now(), self.scenario.duration_s))
        self.system.vision.stop()
        self.settle()

        if self.workers is not None:
            self.workers.stop(config.reporting.deadline_s)
            self.settle()
            self.scheduler.run_until(math.inf, after_each=self.settle)
            self.workers.finish()

        self._shutdown()

        metrics = self.system.metrics.snapshot()
        write_metrics(metrics, config.run.metrics_out)
        return metrics

    def _shutdown(self) -> None:
        router = self.system.router
        event = router.make_event(EventTypes.SHUTDOWN, {"reason": "scenario end"})
        router.send_to_agent(AgentNames.ROUTER, event)
        self.settle()
        self.system.adapter.stop()

    def run_scenario(self) -> ScenarioResults:
        """
            Run the scenario and evaluate its assertions and the conservation
            identities
            :return: the scenario results
        """
        metrics = self.run()
        values = metrics.flatten()

        results = [evaluate_assertion(assertion, values) for assertion in self.scenario.assertions]

        violations = metrics.conservation_violations(self.scenario.config.reporting.enabled)
        results.append(AssertionResult(assertion="conservation identities",
                                       passed=len(violations) == 0,
                                       failure_reason="; ".join(violations)))

        dispatch_calls = self.system.reporting.dispatch_context_calls if self.system.reporting is not None else 0
        results.append(AssertionResult(assertion="reports resolved off the dispatch context",
                                       passed=dispatch_calls == 0,
                                       observed={"dispatch_context_calls": dispatch_calls}))

        scenario_results = ScenarioResults(scenario=self.scenario.name, metrics=metrics, results=results)
        for result in results:
            logging.info("%s: %s %s", self.scenario.name, "PASS" if result.passed else "FAIL", result.assertion)
        return scenario_results


def run_scenario(scenario : Scenario, output_dir : Path | None = None,
                 adapter : ChannelAdapter | None = None) -> ScenarioResults:
    return ScenarioRunner(scenario, output_dir, adapter).run_scenario()
