"""
    Body of an Ollama compatible generate request
"""
from pydantic import BaseModel, Field


class LlmRequest(BaseModel):
    """
        Request sent to the LLM endpoint. Streaming is never used
    """

    model : str = Field(min_length=1)
    prompt : str = Field(min_length=1)
    stream : bool = False
