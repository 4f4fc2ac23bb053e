"""
Command layer of the ``rdi`` tool.

``run`` validates a configuration, executes its command and writes the
artifacts; it reports failures as exit statuses instead of raising.
"""

import json
import logging

from secure_rdi.errors import InfeasibleError, RDIError, UsageError
from secure_rdi.commands.base import RunConfig, RDICurve, CommandResult, \
    write_artifacts
from secure_rdi.commands.regions import RegionCommand, SweepCommand, \
    GaussianCommand
from secure_rdi.commands.simulation import SimulateCommand, \
    VerifyLemmaCommand
from secure_rdi.commands.figures import reproduce_figure, \
    reproduce_from_config

__all__ = ["RunConfig", "RDICurve", "CommandResult", "RunResult", "COMMANDS",
           "EXIT_OK", "EXIT_USAGE", "EXIT_INFEASIBLE", "run", "execute",
           "reproduce_figure", "reproduce_from_config", "reload_report"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3

COMMANDS = {cls.name: cls for cls in (RegionCommand, SweepCommand,
                                      SimulateCommand, VerifyLemmaCommand,
                                      GaussianCommand)}

_log = logging.getLogger("secure_rdi.commands")


class RunResult(object):

    def __init__(self, status, paths=(), result=None, message=None):
        self.status = status
        self.paths = list(paths)
        self.result = result
        self.message = message

    def __repr__(self):
        return "RunResult(status=%d, %d files)" % (self.status,
                                                   len(self.paths))


def execute(config):
    """Run the configured command in memory and return its result."""
    if not isinstance(config, RunConfig):
        config = RunConfig.from_dict(config)
    return COMMANDS[config.command](config).execute()


def run(config, output_dir=None):
    """
    Execute ``config`` and write its artifacts.

    Returns:
        RunResult with status 0 on success, 2 on an invalid configuration
        or unmet precondition and 3 on an infeasible distortion
    """
    try:
        if not isinstance(config, RunConfig):
            config = RunConfig.from_dict(config)
        result = execute(config)
        paths = write_artifacts(result.files(), output_dir or config.output)
    except InfeasibleError as e:
        _log.error("infeasible: %s", e)
        return RunResult(EXIT_INFEASIBLE, message=str(e))
    except RDIError as e:
        _log.error("%s", e)
        return RunResult(EXIT_USAGE, message=str(e))
    return RunResult(EXIT_OK, paths, result)


def reload_report(path):
    """Re-run the configuration stored in a JSON report; return its curves."""
    try:
        with open(path) as f:
            report = json.load(f)
    except (OSError, ValueError) as e:
        raise UsageError("cannot read report %s: %s" % (path, e))
    if report.get("command") == "reproduce":
        details = report.get("details") or {}
        return reproduce_figure(details["figure"],
                                points=details["points"]).curves
    if "config" not in report:
        raise UsageError("report %s carries no configuration" % path)
    return execute(report["config"]).curves
