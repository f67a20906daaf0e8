"""
    Exceptions raised while loading configuration and scenarios
"""


class ConfigParseException(Exception):
    """
        The configuration file is not in the section.key = value format
    """

    line : int

    def __init__(self, line : int, reason : str) -> None:
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class ConfigValidationException(Exception):
    """
        A configuration value failed validation
    """

    field : str
    reason : str

    def __init__(self, field : str, reason : str) -> None:
        super().__init__(f"{field}: {reason}")
        self.field = field
        self.reason = reason


class ScenarioException(Exception):
    """
        The scenario file is malformed
    """


class SnapshotDirException(Exception):
    """
        The snapshot directory cannot be created or written
    """
