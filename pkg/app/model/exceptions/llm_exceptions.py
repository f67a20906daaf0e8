"""
    Exceptions raised while generating captions
"""


class LlmTimeoutException(Exception):
    """
        The LLM did not answer before the report deadline
    """


class LlmUnavailableException(Exception):
    """
        The LLM endpoint refused the connection
    """


class LlmErrorException(Exception):
    """
        The LLM endpoint answered with an error or a malformed body
    """


class EmptyCaptionException(Exception):
    """
        The LLM answered with nothing usable
    """
