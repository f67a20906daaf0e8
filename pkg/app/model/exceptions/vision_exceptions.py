"""
    Exceptions raised by the vision agent and its detector backends
"""


class ParseErrorException(Exception):
    """
        Raised when a replay or script file cannot be parsed
    """

    line : int

    def __init__(self, line : int, reason : str) -> None:
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class InvalidScriptException(Exception):
    """
        Raised when a synthetic trajectory script is inconsistent
    """


class SnapshotWriteException(Exception):
    """
        Raised when an annotated snapshot could not be written to disk
    """


class BackendFailureException(Exception):
    """
        Raised by a detector backend that could not process a frame
    """
