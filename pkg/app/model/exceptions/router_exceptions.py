"""
    Exceptions raised by the message router
"""


class DuplicateAgentException(Exception):
    """
        Raised when an agent name is already registered
    """


class UnknownAgentException(Exception):
    """
        Raised when an event is addressed to, or a subscription made by,
        an agent the router does not know
    """


class UnknownEventTypeException(Exception):
    """
        Raised for event types outside the registered set
    """


class DuplicateSubscriptionException(Exception):
    """
        Raised when an agent subscribes twice to the same event type
    """


class InvalidPayloadValueException(Exception):
    """
        Raised when an event payload holds a value the router cannot carry
    """


class QueueFullException(Exception):
    """
        Raised when the bounded router queue rejects an event
    """
