"""
    Answer of an Ollama compatible generate endpoint
"""
from pydantic import BaseModel


class LlmResponse(BaseModel):
    model : str
    created_at : str
    response : str
    done : bool = True
