"""
    Class to store the results of a scenario run
"""
from pydantic import BaseModel

from app.model.harness.assertion_result import AssertionResult
from app.model.harness.metrics import Metrics


class ScenarioResults(BaseModel):
    """
        Store the metrics and the list of assertion results
    """

    scenario : str
    metrics : Metrics
    results : list[AssertionResult] = []

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    def to_dict(self) -> dict:
        dictionary = { "scenario" : self.scenario,
                       "passed" : self.passed,
                       "results" : [result.to_dict() for result in self.results]}
        return dictionary
