"""
    Client for an Ollama compatible /api/generate endpoint
"""
import json
import logging

import requests
from requests import RequestException
from urllib3.exceptions import HTTPError, ReadTimeoutError

from app.model.exceptions.llm_exceptions import (LlmErrorException, LlmTimeoutException,
                                                 LlmUnavailableException)
from app.model.reporting.llm_request import LlmRequest
from app.model.runtime_constants import RuntimeConstants as rc
from app.services.clock import Deadline
from app.services.llm.llm_client import LlmClient


class OllamaClient(LlmClient):
    """
        One POST per caption with stream off. The body is read in
        chunks so the deadline also bounds a slow answer
    """

    headers : dict[str, str] = {
        "Content-Type": "application/json",
        "Accept": "application/json"
    }

    base_url : str
    descriptor : str

    def __init__(self, base_url : str = rc.LLM_BASE_URL, session : requests.Session | None = None) -> None:
        self.base_url = base_url.rstrip("/")
        self.descriptor = f"ollama:{self.base_url}"
        self._session = session if session is not None else requests.Session()

    @staticmethod
    def encode_request(request : LlmRequest) -> bytes:
        """
            Request body exactly as sent on the wire
        """
        body = {"model": request.model, "prompt": request.prompt, "stream": request.stream}
        return json.dumps(body).encode("utf-8")

    def generate(self, request : LlmRequest, deadline : Deadline) -> str:
        url = self.base_url + rc.LLM_GENERATE_URL
        timeout = deadline.remaining()
        if timeout <= 0:
            raise LlmTimeoutException("deadline passed before the request was sent")

        try:
            resp = self._session.post(url,
                                      data=self.encode_request(request),
                                      headers=self.headers,
                                      timeout=timeout,
                                      stream=True)
        except requests.Timeout as e:
            raise LlmTimeoutException(f"no answer from {url} within {timeout:.1f}s") from e
        except requests.ConnectionError as e:
            raise LlmUnavailableException(f"cannot connect to {url}") from e
        except RequestException as e:
            raise LlmErrorException(str(e)) from e

        try:
            content = self.read_body(resp, deadline, url)
        finally:
            resp.close()

        if resp.status_code < 200 or resp.status_code >= 300:
            raise LlmErrorException(f"{url} answered {resp.status_code}: {content[:200].decode('utf-8', 'replace')}")

        try:
            body = json.loads(content)
        except ValueError as e:
            raise LlmErrorException(f"{url} answered with invalid JSON") from e

        if not isinstance(body, dict) or not isinstance(body.get("response"), str):
            raise LlmErrorException(f"{url} answered without a response field")

        logging.info("LLM %s answered in time, %d characters", request.model, len(body["response"]))
        return body["response"]

    @staticmethod
    def read_body(resp : requests.Response, deadline : Deadline, url : str) -> bytes:
        """
            Read the response body as it arrives, giving up once the deadline
            passes. The request timeout only bounds each socket read
        """
        chunks = []
        while True:
            if deadline.expired():
                raise LlmTimeoutException(f"{url} still answering when the deadline passed")
            try:
                chunk = resp.raw.read1(rc.LLM_READ_CHUNK, decode_content=True)
            except ReadTimeoutError as e:
                raise LlmTimeoutException(f"{url} stalled while answering") from e
            except (HTTPError, OSError) as e:
                raise LlmErrorException(f"{url} answer broken off: {e}") from e
            if not chunk:
                break
            chunks.append(chunk)

        if deadline.expired():
            raise LlmTimeoutException(f"{url} answered after the deadline")
        return b"".join(chunks)
