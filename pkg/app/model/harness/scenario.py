"""
    Scripted experiment definition
"""
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, Field

from app.model.harness.run_config import RunConfig


class ScriptedCommand(BaseModel):
    """
        Operator text injected into the channel at a virtual time
    """

    at : float = Field(ge=0.0)
    text : str


class ScenarioAssertion(BaseModel):
    """
        metric op target, target is a metric name or a number
    """

    metric : str
    op : Literal["==", "!=", ">=", "<=", ">", "<"]
    target : str

    def describe(self) -> str:
        return f"{self.metric} {self.op} {self.target}"


class Scenario(BaseModel):
    """
        A named run with scripted commands and expectations
    """

    name : str
    config : RunConfig
    duration_s : float = Field(gt=0.0)
    commands : list[ScriptedCommand] = []
    assertions : list[ScenarioAssertion] = []
    source : Path | None = None
