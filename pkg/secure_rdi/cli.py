"""``rdi`` console entry point."""

import argparse
import json
import logging
import sys

import secure_rdi
from secure_rdi.errors import RDIError
from secure_rdi.core.closed_forms import FIGURES
from secure_rdi.commands import COMMANDS, EXIT_OK, EXIT_USAGE, run, \
    reproduce_from_config

LOG_FORMAT = "%(asctime)s %(levelname)-7s %(name)s: %(message)s"

_log = logging.getLogger("secure_rdi.cli")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rdi", description="Rate-distortion-leakage regions and "
                                "secret-key binning checks.")
    parser.add_argument("command", choices=sorted(COMMANDS) + ["reproduce"])
    parser.add_argument("--config", help="JSON run configuration")
    parser.add_argument("--seed", type=int, help="overrides the config seed")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--figure", choices=sorted(FIGURES),
                        help="figure to reproduce")
    parser.add_argument("--log-level", help="overrides the config log level")
    parser.add_argument("--version", action="version",
                        version="%(prog)s " + secure_rdi.__version__)
    return parser


def configure_logging(level):
    """Root handler at ``level``; False when the level name is unknown."""
    value = logging.getLevelName(str(level).upper())
    known = isinstance(value, int)
    logging.basicConfig(level=value if known else logging.INFO,
                        format=LOG_FORMAT)
    logging.getLogger("secure_rdi").setLevel(value if known else logging.INFO)
    if not known:
        _log.error("unknown log level %r", level)
    return known


def _load(path):
    with open(path) as f:
        data = json.load(f)
    if not isinstance(data, dict):
        raise ValueError("top level must be an object")
    return data


def _reproduce(args):
    data = {}
    if args.config is not None:
        try:
            data = _load(args.config)
        except (OSError, ValueError) as e:
            configure_logging(args.log_level or "INFO")
            _log.error("cannot read config %s: %s", args.config, e)
            return EXIT_USAGE
    if not configure_logging(args.log_level or data.get("log_level", "INFO")):
        return EXIT_USAGE
    if data.setdefault("command", "reproduce") != "reproduce":
        _log.error("config is for %r, not 'reproduce'", data["command"])
        return EXIT_USAGE
    if args.figure is not None:
        data["figure"] = args.figure
    if args.out is not None:
        data["output"] = args.out
    if data.get("figure") is None:
        _log.error("reproduce needs --figure or a config naming a figure")
        return EXIT_USAGE
    try:
        reproduce_from_config(data)
    except RDIError as e:
        _log.error("%s", e)
        return EXIT_USAGE
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    level = args.log_level or "INFO"

    if args.command == "reproduce":
        return _reproduce(args)

    if args.config is None:
        configure_logging(level)
        _log.error("%s needs --config", args.command)
        return EXIT_USAGE
    try:
        data = _load(args.config)
    except (OSError, ValueError) as e:
        configure_logging(level)
        _log.error("cannot read config %s: %s", args.config, e)
        return EXIT_USAGE
    if not configure_logging(args.log_level or data.get("log_level", "INFO")):
        return EXIT_USAGE
    if data.setdefault("command", args.command) != args.command:
        _log.error("config is for %r, not %r", data["command"], args.command)
        return EXIT_USAGE
    if args.seed is not None:
        data["seed"] = args.seed
    if args.out is not None:
        data["output"] = args.out
    return run(data).status


if __name__ == "__main__":
    sys.exit(main())
