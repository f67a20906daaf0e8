"""
    Loads run configurations and scenarios from the flat section.key = value format
"""
import logging
import os
import re
from enum import Enum
from pathlib import Path

from pydantic import BaseModel, ValidationError

from app.model.exceptions.config_exceptions import (ConfigParseException, ConfigValidationException,
                                                    ScenarioException)
from app.model.harness.metrics import Metrics
from app.model.harness.run_config import RunConfig
from app.model.harness.scenario import Scenario, ScenarioAssertion, ScriptedCommand
from app.model.runtime_constants import EnvironmentVariables

ASSERTION_PATTERN = re.compile(r"^([\w.]+)\s*(==|!=|>=|<=|>|<)\s*([\w.+-]+)$")

SCENARIO_PREFIXES = ("scenario.", "command.", "assert.")


class FlatEntry(BaseModel):
    value : str
    line : int


def parse_flat(text : str) -> dict[str, FlatEntry]:
    """
        Parse section.key = value lines. # starts a comment line, blank lines
        are ignored and a key may only appear once.

        :return: dotted keys in file order
    """
    entries : dict[str, FlatEntry] = {}

    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line == "" or line.startswith("#"):
            continue

        if "=" not in line:
            raise ConfigParseException(number, f"expected 'section.key = value', got {line!r}")

        key, value = (part.strip() for part in line.split("=", 1))
        if "." not in key or key.startswith(".") or key.endswith(".") or " " in key:
            raise ConfigParseException(number, f"key {key!r} is not of the form section.key")

        if key in entries:
            raise ConfigParseException(number, f"duplicate key {key!r}")

        entries[key] = FlatEntry(value=value, line=number)

    return entries


def nest(entries : dict[str, FlatEntry]) -> dict[str, dict[str, str | None]]:
    """
        Group section.key entries by section. Empty values mean "unset"
    """
    sections : dict[str, dict[str, str | None]] = {}
    for key, entry in entries.items():
        section, name = key.split(".", 1)
        sections.setdefault(section, {})[name] = entry.value if entry.value != "" else None
    return sections


def validate_config(sections : dict[str, dict[str, str | None]]) -> RunConfig:
    """
        Validate grouped entries into a RunConfig, unknown keys are rejected
    """
    for section, values in sections.items():
        if section not in RunConfig.model_fields:
            raise ConfigValidationException(f"{section}.{next(iter(values))}", "unknown key")

    try:
        return RunConfig.model_validate(sections)
    except ValidationError as e:
        error = e.errors()[0]
        field = ".".join(str(part) for part in error["loc"])
        reason = "unknown key" if error["type"] == "extra_forbidden" else error["msg"]
        raise ConfigValidationException(field, reason) from e


def parse_config_text(text : str) -> RunConfig:
    """
        Parse and validate configuration text, applying every default
    """
    return validate_config(nest(parse_flat(text)))


def load_config(path : Path) -> RunConfig:
    """
        Load a configuration file. Relative backend paths are resolved against
        the file's directory and LLM_BASE_URL overrides reporting.base_url
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigParseException(0, f"cannot read {path}: {e}") from e

    config = parse_config_text(text)
    return apply_environment(resolve_paths(config, Path(path).parent))


def resolve_paths(config : RunConfig, base_dir : Path) -> RunConfig:
    if config.backend.path is None or config.backend.path.is_absolute():
        return config
    backend = config.backend.model_copy(update={"path": base_dir / config.backend.path})
    return config.model_copy(update={"backend": backend})


def apply_environment(config : RunConfig) -> RunConfig:
    base_url = os.environ.get(EnvironmentVariables.LLM_BASE_URL, "").strip()
    if base_url == "":
        return config
    logging.info("LLM base url overridden from environment: %s", base_url)
    reporting = config.reporting.model_copy(update={"base_url": base_url})
    return config.model_copy(update={"reporting": reporting})


def render_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, Path):
        return value.as_posix()
    if isinstance(value, frozenset):
        return ",".join(sorted(value))
    if isinstance(value, tuple):
        return "x".join(str(part) for part in value)
    return str(value)


def render_config(config : RunConfig) -> str:
    """
        Render a configuration with every default made explicit
    """
    lines = []
    for section in RunConfig.model_fields:
        model = getattr(config, section)
        for name in type(model).model_fields:
            lines.append(f"{section}.{name} = {render_value(getattr(model, name))}".rstrip())
    return "\n".join(lines) + "\n"


def load_scenario(path : Path) -> Scenario:
    """
        Load a scenario: run configuration keys plus scenario.*, command.* and assert.* keys
    """
    path = Path(path)
    try:
        entries = parse_flat(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise ScenarioException(f"cannot read {path}: {e}") from e
    except ConfigParseException as e:
        raise ScenarioException(f"{path}: {e}") from e

    config_entries = {k: v for k, v in entries.items() if not k.startswith(SCENARIO_PREFIXES)}
    try:
        config = resolve_paths(validate_config(nest(config_entries)), path.parent)
    except ConfigValidationException as e:
        raise ScenarioException(f"{path}: {e}") from e

    scenario = nest({k: v for k, v in entries.items() if k.startswith("scenario.")}).get("scenario", {})
    unknown = set(scenario) - {"name", "duration_s"}
    if unknown:
        raise ScenarioException(f"{path}: unknown scenario keys {sorted(unknown)}")

    try:
        return Scenario(name=scenario.get("name") or path.stem,
                        config=config,
                        duration_s=scenario.get("duration_s"),
                        commands=parse_commands(entries),
                        assertions=parse_assertions(entries),
                        source=path)
    except ValidationError as e:
        raise ScenarioException(f"{path}: {e.errors()[0]['msg']}") from e


def parse_commands(entries : dict[str, FlatEntry]) -> list[ScriptedCommand]:
    grouped : dict[str, dict[str, str]] = {}
    for key, entry in entries.items():
        if not key.startswith("command."):
            continue
        parts = key.split(".")
        if len(parts) != 3 or parts[2] not in ("at", "text"):
            raise ScenarioException(f"line {entry.line}: expected command.<id>.at or command.<id>.text")
        grouped.setdefault(parts[1], {})[parts[2]] = entry.value

    commands = []
    for command_id, fields in grouped.items():
        if "at" not in fields or "text" not in fields:
            raise ScenarioException(f"command {command_id} needs both at and text")
        commands.append(ScriptedCommand(at=fields["at"], text=fields["text"]))

    return sorted(commands, key=lambda command: command.at)


def parse_assertions(entries : dict[str, FlatEntry]) -> list[ScenarioAssertion]:
    known = Metrics().flatten()
    assertions = []

    for key, entry in entries.items():
        if not key.startswith("assert."):
            continue

        match = ASSERTION_PATTERN.match(entry.value)
        if match is None:
            raise ScenarioException(f"line {entry.line}: cannot parse assertion {entry.value!r}")

        metric, op, target = match.groups()
        if metric not in known:
            raise ScenarioException(f"line {entry.line}: unknown metric {metric!r}")
        if target not in known and not is_number(target):
            raise ScenarioException(f"line {entry.line}: {target!r} is neither a metric nor a number")

        assertions.append(ScenarioAssertion(metric=metric, op=op, target=target))

    return assertions


def is_number(text : str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True
