"""
    Keyword grammar of the operator commands
"""
import re

from pydantic import ValidationError

from app.model.channel.command import Command, CommandKind
from app.model.channel.configure_params import CONFIGURE_KEYS, ConfigureParams
from app.model.exceptions.config_exceptions import ConfigValidationException

MENTION_PATTERN = re.compile(r"^(<@[A-Za-z0-9_]+>|@\S+)\s*")

SIMPLE_KINDS = {CommandKind.START, CommandKind.STOP, CommandKind.STATUS, CommandKind.HELP, CommandKind.QUIT}

HELP_TEXT = ("Commands:\n"
             "  start                      start the vision agent\n"
             "  stop                       stop the vision agent\n"
             "  status                     frame rate, pending reports and report outcomes\n"
             "  configure key=value ...    change labels, resolution, theta, conf, dwell, cooldown, preview, model\n"
             "  quit                       shut the system down\n"
             "  help                       this message")


def strip_prefix(text : str) -> str:
    """
        Remove a leading mention (<@U123>, @bot) and a ! or / command prefix
    """
    text = MENTION_PATTERN.sub("", text.strip(), count=1)
    if text[:1] in ("!", "/"):
        text = text[1:]
    return text.strip()


def parse_command(text : str) -> Command:
    """
        Parse an operator message. Never fails: anything outside the grammar
        is an unknown command carrying the raw text
    """
    unknown = Command(kind=CommandKind.UNKNOWN, raw=text)
    tokens = strip_prefix(text).split()
    if not tokens:
        return unknown

    try:
        kind = CommandKind(tokens[0].lower())
    except ValueError:
        return unknown

    if kind in SIMPLE_KINDS:
        return Command(kind=kind) if len(tokens) == 1 else unknown

    if kind is not CommandKind.CONFIGURE:
        return unknown

    params : dict[str, str] = {}
    for token in tokens[1:]:
        key, separator, value = token.partition("=")
        key = key.lower()
        if separator == "" or value == "" or key not in CONFIGURE_KEYS or key in params:
            return unknown
        params[key] = value

    if not params:
        return unknown
    return Command(kind=CommandKind.CONFIGURE, params=params)


def render_command(command : Command) -> str:
    """
        Text that parses back to the same command
    """
    match command.kind:
        case CommandKind.UNKNOWN:
            return command.raw
        case CommandKind.CONFIGURE:
            return " ".join(["configure"] + [f"{key}={value}" for key, value in command.params.items()])
        case _:
            return command.kind.value


def validate_configure(params : dict[str, str]) -> ConfigureParams:
    """
        Type check configure parameters
        :return: the validated values
    """
    try:
        return ConfigureParams.model_validate(params)
    except ValidationError as e:
        error = e.errors()[0]
        field = ".".join(str(part) for part in error["loc"]) or "configure"
        raise ConfigValidationException(field, error["msg"]) from e
