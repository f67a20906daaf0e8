"""
    Ollama compatible generate endpoint answering with mock captions
"""
import asyncio
import logging
from datetime import datetime, timezone

from fastapi import FastAPI

from app.model.reporting.llm_request import LlmRequest
from app.model.reporting.llm_response import LlmResponse
from app.services.llm.mock_llm_client import MockLlmClient

description = """

## Mock LLM for the reporting agent

Answers `POST /api/generate` like Ollama, after a configurable delay, so the
reporting agent can run against a remote endpoint without a model.

"""

tags_metadata = [
    {
        "name": "generate",
        "description": "Generate a caption for a prompt",
    }
]


def create_app(delay_s : float = 0.0) -> FastAPI:
    """
        Build the mock service
        :param delay_s: seconds to wait before every answer
        :return: the FastAPI application
    """
    app = FastAPI(openapi_tags=tags_metadata, title="Mock LLM", description=description)
    app.state.delay_s = delay_s

    @app.post("/api/generate", tags=["generate"])
    async def generate(data : LlmRequest) -> LlmResponse:
        """
        Caption the prompt the way the in-process mock client does

        :return: a non-streamed generate answer
        """
        logging.info("Generate request for model %s, %d prompt characters", data.model, len(data.prompt))
        if app.state.delay_s > 0:
            await asyncio.sleep(app.state.delay_s)

        return LlmResponse(model=data.model,
                           created_at=datetime.now(timezone.utc).isoformat(),
                           response=MockLlmClient.caption_for(data.prompt))

    return app
