"""
EnK - time-encoding convolution toolkit, command-line entry point
"""

import argparse
import logging
import sys
from typing import List, NoReturn, Optional

from pydantic import ValidationError

from enk import __version__
from enk.commands import COMMANDS
from enk.config import configure_logging, get_settings, load_run_config
from enk.errors import EXIT_OK, EXIT_USAGE, ConfigError, EnkError

logger = logging.getLogger("enk.cli")


class CliParser(argparse.ArgumentParser):
    """Usage errors raise ConfigError so they exit with 1 like every other config problem."""

    def error(self, message: str) -> NoReturn:
        raise ConfigError(f"{self.prog}: {message}")


def build_parser() -> CliParser:
    parser = CliParser(
        prog="enk",
        description="EnK time-encoding convolution: data generation, training, evaluation, "
                    "gradient checks, benchmarks and Grad-CAM export",
        epilog="Every run-file key can be overridden with a flag of the same name, e.g. --train.seed 3",
        allow_abbrev=False,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    # Register commands
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    """Parse ``argv``, run the command and map failures to exit codes."""
    settings = get_settings()
    configure_logging(settings)
    try:
        args, extra = build_parser().parse_known_args(argv)
        config = load_run_config(args.config, extra, settings)
        return args.handler(args, config, settings)
    except EnkError as exc:
        logger.error("%s", exc.detail)
        return exc.exit_code
    except ValidationError as exc:
        logger.error("invalid parameters: %s", exc)
        return EXIT_USAGE
    except Exception:
        logger.exception("unexpected failure")
        return EXIT_USAGE


def main() -> None:
    code = run()
    sys.exit(code if code is not None else EXIT_OK)


if __name__ == "__main__":
    main()
