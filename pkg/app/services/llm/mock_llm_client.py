"""
    Deterministic stand-in for the LLM used by tests and scenarios
"""
import hashlib
import re

from app.model.exceptions.llm_exceptions import (LlmErrorException, LlmTimeoutException,
                                                 LlmUnavailableException)
from app.model.reporting.llm_request import LlmRequest
from app.services.clock import Deadline
from app.services.llm.llm_client import LlmClient

SUMMARY_PATTERN = re.compile(r"At (?P<timestamp>\S+), the detector observed: (?P<summary>.*?)\. System configuration:")


class MockLlmClient(LlmClient):
    """
        Caption = "ALERT: " + the per-label counts + the timestamp read back
        from the prompt, followed by a short digest of the prompt.

        delay_s is spent on the deadline's clock, so on a simulated clock a
        70 s answer costs no wall time. failures makes the first calls fail
        with the named kind: unavailable, error or empty.
    """

    descriptor : str = "mock"
    delay_s : float

    def __init__(self, delay_s : float = 0.0, failures : list[str] | None = None) -> None:
        self.delay_s = delay_s
        self.failures = list(failures or [])
        self.calls = 0

    @staticmethod
    def caption_for(prompt : str) -> str:
        digest = hashlib.sha1(prompt.encode("utf-8")).hexdigest()[:8]
        match = SUMMARY_PATTERN.search(prompt)
        if match is None:
            return f"ALERT: {digest}"
        return f"ALERT: {match.group('summary')} at {match.group('timestamp')} [{digest}]"

    def generate(self, request : LlmRequest, deadline : Deadline) -> str:
        self.calls += 1

        if self.failures:
            failure = self.failures.pop(0)
            match failure:
                case "unavailable":
                    raise LlmUnavailableException("mock endpoint down")
                case "error":
                    raise LlmErrorException("mock endpoint answered 500")
                case "empty":
                    return "   "

        remaining = deadline.remaining()
        if self.delay_s > remaining:
            deadline.clock.sleep(remaining)
            raise LlmTimeoutException(f"mock answer needs {self.delay_s}s, {remaining:.3f}s left")

        deadline.clock.sleep(self.delay_s)
        return self.caption_for(request.prompt)
