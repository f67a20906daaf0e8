"""
    Store the individual assertion result
"""
from pydantic import BaseModel


class AssertionResult(BaseModel):
    """
        Store a single scenario assertion result
    """

    assertion : str
    passed : bool
    observed : dict[str, float] = {}
    failure_reason : str = ""

    def to_dict(self) -> dict:
        return self.model_dump()
