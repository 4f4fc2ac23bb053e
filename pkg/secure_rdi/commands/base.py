"""
Command plumbing: run configuration, curves and report artifacts.

A command reads its parameters from the ``parameters`` object of a run
configuration, validated against its ``param_def`` rows, and returns a
``CommandResult``. Nothing reaches the disk until the whole command has
succeeded; then every file is written to a temporary name and renamed.
"""

import copy
import csv
import datetime
import io
import json
import logging
import os
from multiprocessing.pool import ThreadPool

import secure_rdi
from secure_rdi.config import Type, Description, DefaultValue, Required, \
    fill_properties, param_table
from secure_rdi.errors import UsageError
from secure_rdi.core.probability import JointPMF
from secure_rdi.core.regions import RDIPoint, FLOOR
from secure_rdi.core.solvers import DistortionSpec, RDSolverConfig
from secure_rdi.core.closed_forms import GaussianChainParams, \
    erasure_source

__all__ = ["RunConfig", "RDICurve", "Command", "CommandResult",
           "write_artifacts", "curve_metadata", "increasing_grid",
           "COMMAND_NAMES", "SOURCE_FORMS"]

COMMAND_NAMES = ("region", "sweep", "simulate", "verify-lemma", "gaussian")
SOURCE_FORMS = ("pmf", "erasure", "gaussian")
CSV_FORMAT = "%.12g"
CURVE_TOL = 1e-9

_log = logging.getLogger("secure_rdi.commands")


def _timestamp():
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def curve_metadata(case, params=None, seed=None):
    return {"case": case, "params": params or {}, "timestamp": _timestamp(),
            "version": secure_rdi.__version__, "seed": seed}


def increasing_grid(name, grid):
    if grid is None:
        return
    if not grid:
        raise UsageError("%s must not be empty" % name)
    for a, b in zip(grid, grid[1:]):
        if not b > a:
            raise UsageError("%s must be strictly increasing, got %r"
                             % (name, grid))


class RunConfig(object):
    """Validated run configuration, usually loaded from a JSON file."""

    run_properties = {
        'command': {Type: str, Required: True,
                    Description: 'One of %s' % ", ".join(COMMAND_NAMES)},
        'pmf': {Type: dict,
                Description: 'Inline joint pmf document (axes, probs)'},
        'erasure': {Type: dict,
                    Description: 'Erasure model: {"case": ..., "params": '
                                 '{...}}'},
        'gaussian': {Type: dict,
                     Description: 'Gaussian chain variances and ordering'},
        'distortion': {Type: object, DefaultValue: "hamming",
                       Description: 'hamming, log-loss or {"matrix": ...}'},
        'variables': {Type: dict, DefaultValue: {},
                      Description: 'Names of x, y, z and w in the pmf'},
        'D': {Type: float, Description: 'Distortion of a single point'},
        'R_h': {Type: float, Description: 'Helper rate of a single point'},
        'D_grid': {Type: [float], Description: 'Distortion grid'},
        'R_h_grid': {Type: [float], Description: 'Helper rate grid'},
        'solver': {Type: dict, DefaultValue: {},
                   Description: 'Rate-distortion solver settings'},
        'parameters': {Type: dict, DefaultValue: {},
                       Description: 'Command parameters (see param_def)'},
        'seed': {Type: int, Description: 'Seed of every random draw'},
        'output': {Type: str, DefaultValue: ".",
                   Description: 'Output directory'},
        'log_level': {Type: str, DefaultValue: "INFO",
                      Description: 'Logging level name'},
        'workers': {Type: int, DefaultValue: 1,
                    Description: 'Threads evaluating grid points'},
    }

    stochastic = ("simulate", "verify-lemma")
    variable_defaults = {"x": "X", "y": "Y", "z": "Z", "w": "W"}

    def __init__(self, **kwargs):
        values = fill_properties(self.run_properties, kwargs, "run config")
        self.__dict__.update(values)
        if self.command not in COMMAND_NAMES:
            raise UsageError("unknown command %r (use one of %s)"
                             % (self.command, ", ".join(COMMAND_NAMES)))
        forms = [form for form in SOURCE_FORMS
                 if getattr(self, form) is not None]
        if len(forms) != 1:
            raise UsageError("exactly one source form (%s) is required, "
                             "got %s" % (", ".join(SOURCE_FORMS),
                                         forms or "none"))
        self.source_form = forms[0]
        increasing_grid("D_grid", self.D_grid)
        increasing_grid("R_h_grid", self.R_h_grid)
        if self.command in self.stochastic and self.seed is None:
            raise UsageError("command %r needs a seed" % self.command)
        if self.workers < 1:
            raise UsageError("workers must be >= 1, got %d" % self.workers)
        if not isinstance(logging.getLevelName(self.log_level.upper()), int):
            raise UsageError("unknown log level %r" % self.log_level)
        unknown = set(self.variables) - set(self.variable_defaults)
        if unknown:
            raise UsageError("unknown variable roles %s" % sorted(unknown))
        self.dist = DistortionSpec.from_json(self.distortion)
        solver = dict(self.solver)
        if self.seed is not None:
            solver.setdefault("seed", self.seed)
        self.solver_config = RDSolverConfig.from_dict(solver)

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise UsageError("run config must be a JSON object")
        return cls(**copy.deepcopy(data))

    @classmethod
    def from_file(cls, path):
        try:
            with open(path) as f:
                data = json.load(f)
        except (OSError, ValueError) as e:
            raise UsageError("cannot read config %s: %s" % (path, e))
        return cls.from_dict(data)

    def names(self):
        names = dict(self.variable_defaults)
        names.update(self.variables)
        return names

    def source(self):
        """Joint pmf of a pmf or erasure source form."""
        if self.source_form == "pmf":
            return JointPMF.from_json(self.pmf)
        if self.source_form == "erasure":
            return erasure_source(self.erasure_case(),
                                  self.erasure.get("params"))
        raise UsageError("command %r needs a discrete source, got a "
                         "Gaussian one" % self.command)

    def erasure_case(self):
        if "case" not in self.erasure:
            raise UsageError("erasure source needs a 'case'")
        return self.erasure["case"]

    def gaussian_params(self):
        return GaussianChainParams.from_dict(self.gaussian)

    def to_json(self):
        return {name: getattr(self, name) for name in self.run_properties
                if getattr(self, name) is not None}

    def __repr__(self):
        return "RunConfig(%s, %s source)" % (self.command, self.source_form)


class RDICurve(object):
    """Points of one tradeoff curve, ordered by ``key`` (D or R_h)."""

    metadata_keys = ("case", "params", "timestamp", "version", "seed")

    def __init__(self, name, points, metadata, key="D"):
        if key not in ("D", "R_h"):
            raise UsageError("curve key must be D or R_h, got %r" % key)
        self.name = name
        self.points = list(points)
        self.key = key
        self.metadata = dict(metadata)
        missing = [k for k in self.metadata_keys if k not in self.metadata]
        if missing:
            raise UsageError("curve %s lacks metadata %s" % (name, missing))

    @property
    def with_helper(self):
        return any(p.R_h is not None for p in self.points)

    def keys(self):
        return [getattr(p, self.key) for p in self.points]

    def to_csv(self):
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        header = ["D", "R", "Delta"]
        if self.with_helper:
            header.append("Rh")
        writer.writerow(header)
        for point in self.points:
            writer.writerow([CSV_FORMAT % v
                             for v in point.row(self.with_helper)])
        return buffer.getvalue()

    def check(self, tol=CURVE_TOL):
        """Monotonicity and floor violations, as messages."""
        problems = []
        keys = self.keys()
        for a, b in zip(keys, keys[1:]):
            if not b > a:
                problems.append("%s: points not sorted by %s"
                                % (self.name, self.key))
                break
        for field in ("R", "Delta"):
            values = [getattr(p, field) for p in self.points]
            for i, (a, b) in enumerate(zip(values, values[1:])):
                if b > a + tol:
                    problems.append("%s: %s increases along %s at %g"
                                    % (self.name, field, self.key,
                                       keys[i + 1]))
                    break
        floors = [p.Delta for p in self.points if p.branch == FLOOR]
        if floors:
            if max(floors) - min(floors) > tol:
                problems.append("%s: floor leakage varies along the curve"
                                % self.name)
            if min(p.Delta for p in self.points) < min(floors) - tol:
                problems.append("%s: leakage below the floor" % self.name)
        return problems

    def kinks(self):
        branches = [p.branch for p in self.points]
        return sum(a != b for a, b in zip(branches, branches[1:]))

    def to_json(self):
        return {"name": self.name, "key": self.key,
                "metadata": self.metadata,
                "points": [p.to_json() for p in self.points]}

    @classmethod
    def from_json(cls, data):
        return cls(data["name"], [RDIPoint.from_json(p)
                                  for p in data["points"]],
                   data["metadata"], data.get("key", "D"))

    def __repr__(self):
        return "RDICurve(%s, %d points by %s)" % (self.name,
                                                  len(self.points), self.key)


class CommandResult(object):
    """Curves, extra tables and details produced by one command."""

    def __init__(self, command, config, curves=(), tables=None,
                 details=None):
        self.command = command
        self.config = config
        self.curves = list(curves)
        self.tables = dict(tables or {})
        self.details = details
        self.violations = []
        for curve in self.curves:
            self.violations.extend(curve.check())
        for problem in self.violations:
            _log.warning("invariant check: %s", problem)

    def flag(self, problem):
        _log.warning("invariant check: %s", problem)
        self.violations.append(problem)

    def report(self):
        data = {"command": self.command, "version": secure_rdi.__version__,
                "timestamp": _timestamp(),
                "curves": [curve.to_json() for curve in self.curves],
                "violations": list(self.violations)}
        if self.config is not None:
            data["config"] = self.config.to_json()
        if self.tables:
            data["tables"] = {name: {"header": header, "rows": rows}
                              for name, (header, rows) in
                              self.tables.items()}
        if self.details is not None:
            data["details"] = self.details
        return data

    def files(self):
        """File name to text, CSVs first and the JSON report last."""
        files = {}
        for curve in self.curves:
            files["%s.csv" % curve.name] = curve.to_csv()
        for name, (header, rows) in self.tables.items():
            buffer = io.StringIO()
            writer = csv.writer(buffer, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([CSV_FORMAT % v if isinstance(v, float)
                                 else v for v in row])
            files["%s.csv" % name] = buffer.getvalue()
        files["%s.json" % self.command] = json.dumps(
            self.report(), indent=2, sort_keys=True, default=_json_default)
        return files


def _json_default(value):
    if hasattr(value, "to_json"):
        return value.to_json()
    if hasattr(value, "tolist"):
        return value.tolist()
    raise TypeError("%r is not JSON serializable" % (value,))


def write_artifacts(files, output_dir):
    """Write every file to a temporary name, then rename them all."""
    try:
        os.makedirs(output_dir, exist_ok=True)
    except OSError as e:
        raise UsageError("cannot create output directory %s: %s"
                         % (output_dir, e))
    staged = []
    try:
        for name, text in files.items():
            path = os.path.join(output_dir, name)
            tmp = path + ".tmp"
            with open(tmp, "w", encoding="utf-8") as f:
                f.write(text)
                f.flush()
                os.fsync(f.fileno())
            staged.append((tmp, path))
    except OSError as e:
        for tmp, _ in staged:
            os.remove(tmp)
        raise UsageError("cannot write to %s: %s" % (output_dir, e))
    for tmp, path in staged:
        os.replace(tmp, path)
    _log.info("wrote %s to %s", ", ".join(sorted(files)), output_dir)
    return [path for _, path in staged]


class Command(object):
    """
    Base class of the ``rdi`` commands.

    Subclasses declare ``name`` and ``param_def`` rows
    ``[name, type, default, description]``, check them in ``prepare`` and
    compute in ``run``.
    """

    name = None
    param_def = []

    def __init__(self, config):
        self.config = config
        self._log = logging.getLogger("secure_rdi.commands.%s" % self.name)
        self.params = fill_properties(param_table(self.param_def),
                                      config.parameters,
                                      "%s parameters" % self.name)

    def output(self, msg, *args):
        self._log.info(msg, *args)

    def info(self, msg, *args):
        self._log.info(msg, *args)

    def debug(self, msg, *args):
        self._log.debug(msg, *args)

    def warning(self, msg, *args):
        self._log.warning(msg, *args)

    def error(self, msg, *args):
        self._log.error(msg, *args)

    def prepare(self):
        """Check parameters against the source form; raise UsageError."""

    def run(self):
        raise NotImplementedError

    def execute(self):
        self.prepare()
        self.info("running %s on a %s source", self.name,
                  self.config.source_form)
        return self.run()

    def map_points(self, func, items):
        """``func`` over ``items``, in order, on ``workers`` threads."""
        items = list(items)
        if self.config.workers <= 1 or len(items) <= 1:
            return [func(item) for item in items]
        pool = ThreadPool(min(self.config.workers, len(items)))
        try:
            return pool.map(func, items)
        finally:
            pool.close()
            pool.join()

    def metadata(self, case, params=None):
        return curve_metadata(case, params, self.config.seed)
