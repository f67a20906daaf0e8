"""
    Exceptions raised by the chat channel adapters
"""


class ChannelUnavailableException(Exception):
    """
        The chat channel could not be reached
    """


class AttachmentMissingException(Exception):
    """
        A snapshot attachment could not be read
    """


class AuthFailureException(Exception):
    """
        The chat service rejected the configured tokens
    """


class AdapterInitException(Exception):
    """
        A channel adapter or detector backend could not be initialised
    """
