"""
    edgewatch command line: live daemon, scenarios, config validation and the mock LLM
"""
import json
import logging
import sys
from pathlib import Path

import click
import uvicorn
from dotenv import load_dotenv

from app.controllers.daemon_controller import (EXIT_ASSERTION_FAILED, EXIT_CONFIG_ERROR, EXIT_OK,
                                               EXIT_RUNTIME_FAULT, run_daemon)
from app.controllers.mock_llm_api import create_app
from app.model.exceptions.channel_exceptions import AdapterInitException, AuthFailureException
from app.model.exceptions.config_exceptions import (ConfigParseException, ConfigValidationException,
                                                    ScenarioException, SnapshotDirException)
from app.model.exceptions.vision_exceptions import InvalidScriptException, ParseErrorException
from app.model.runtime_constants import VERSION
from app.services.config_loader import load_config, load_scenario, render_config
from app.test_scripts.scenario_runner import run_scenario

logging.basicConfig(level=logging.INFO)


def attach_log_file(path : Path | None) -> None:
    if path is None:
        return
    handler = logging.FileHandler(path, encoding="utf-8")
    handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s %(message)s"))
    logging.getLogger().addHandler(handler)


@click.group()
def cli() -> None:
    """
    Event driven vision, reporting and chat agents for edge surveillance
    """
    load_dotenv()


@cli.command()
@click.option("--config", "config_path", required=True, type=click.Path(path_type=Path))
def run(config_path : Path) -> None:
    """
    Run the daemon on the wall clock until interrupted or told to quit
    """
    try:
        config = load_config(config_path)
    except (ConfigParseException, ConfigValidationException) as e:
        click.echo(f"{config_path}: {e}", err=True)
        sys.exit(EXIT_CONFIG_ERROR)

    attach_log_file(config.run.log_file)
    sys.exit(run_daemon(config))


@cli.command()
@click.option("--file", "scenario_path", required=True, type=click.Path(path_type=Path))
@click.option("--output-dir", type=click.Path(path_type=Path), default=None,
              help="Write snapshots and the metrics file here instead of the configured paths")
@click.option("--json", "as_json", is_flag=True, help="Print the assertion results as JSON")
def scenario(scenario_path : Path, output_dir : Path | None, as_json : bool) -> None:
    """
    Run a scripted scenario on the simulated clock and check its assertions
    """
    try:
        loaded = load_scenario(scenario_path)
    except ScenarioException as e:
        click.echo(str(e), err=True)
        sys.exit(EXIT_CONFIG_ERROR)

    attach_log_file(loaded.config.run.log_file)
    try:
        results = run_scenario(loaded, output_dir)
    except (AdapterInitException, AuthFailureException, SnapshotDirException,
            ParseErrorException, InvalidScriptException, OSError) as e:
        click.echo(f"{loaded.name}: {e}", err=True)
        sys.exit(EXIT_RUNTIME_FAULT)

    if as_json:
        click.echo(json.dumps(results.to_dict(), indent=2))
    else:
        for result in results.results:
            status = "PASS" if result.passed else "FAIL"
            reason = f"  ({result.failure_reason})" if result.failure_reason else ""
            click.echo(f"{status} {result.assertion}{reason}")

    sys.exit(EXIT_OK if results.passed else EXIT_ASSERTION_FAILED)


@cli.command()
@click.option("--config", "config_path", required=True, type=click.Path(path_type=Path))
def validate(config_path : Path) -> None:
    """
    Validate a configuration and print it with every default made explicit
    """
    try:
        config = load_config(config_path)
    except (ConfigParseException, ConfigValidationException) as e:
        click.echo(f"{config_path}: {e}", err=True)
        sys.exit(EXIT_CONFIG_ERROR)

    click.echo(render_config(config), nl=False)


@cli.command()
def version() -> None:
    """
    Print the version
    """
    click.echo(f"edgewatch {VERSION}")


@cli.command("serve-mock-llm")
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=11434, type=int)
@click.option("--delay", default=0.0, type=float, help="Seconds to wait before every answer")
def serve_mock_llm(host : str, port : int, delay : float) -> None:
    """
    Serve an Ollama compatible endpoint that answers with mock captions
    """
    uvicorn.run(create_app(delay), host=host, port=port)


if __name__ == "__main__":
    cli()
