"""
    Interface every caption generator implements
"""
import abc

from app.model.reporting.llm_request import LlmRequest
from app.services.clock import Deadline


class LlmClient(abc.ABC):
    """
        generate() must give up with LlmTimeoutException instead of blocking
        past the deadline
    """

    descriptor : str

    @abc.abstractmethod
    def generate(self, request : LlmRequest, deadline : Deadline) -> str:
        """
            :return: the caption text
        """
