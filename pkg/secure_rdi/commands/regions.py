"""Region, sweep and Gaussian commands."""

from secure_rdi.errors import UsageError
from secure_rdi.core.regions import region_open_markov, region_closed, \
    region_helper_logloss, region_helper_degraded
from secure_rdi.core.closed_forms import HELPER_CASES, erasure_region, \
    gaussian_region
from secure_rdi.commands.base import Command, CommandResult, RDICurve

__all__ = ["RegionCommand", "SweepCommand", "GaussianCommand"]

OPEN = "open"
CLOSED = "closed"
HELPER_LOGLOSS = "helper-logloss"
HELPER_DEGRADED = "helper-degraded"


class RegionCommand(Command):
    """Evaluate one R.D.I. point at ``D`` (and ``R_h``)."""

    name = "region"
    settings = (OPEN, CLOSED, HELPER_LOGLOSS, HELPER_DEGRADED)

    param_def = [
        ['setting', str, OPEN,
         'Region of an inline pmf: open, closed, helper-logloss or '
         'helper-degraded'],
        ['check_equality', bool, False,
         'Require R_WZ(D) = R_SI-Enc(D) before using the exact region'],
        ['markov_tol', float, 1e-9, 'Tolerance of the Markov chain checks'],
    ]

    def prepare(self):
        cfg = self.config
        if cfg.D_grid is not None or cfg.R_h_grid is not None:
            raise UsageError("region evaluates a single point, use sweep "
                             "for grids")
        if cfg.D is None:
            raise UsageError("region needs D")
        self.check_setting()
        self.check_helper_rate(cfg.R_h)

    def check_setting(self):
        setting = self.params.get('setting')
        if setting is not None and setting not in self.settings:
            raise UsageError("unknown setting %r (use one of %s)"
                             % (setting, ", ".join(self.settings)))

    def has_helper(self):
        form = self.config.source_form
        if form == "gaussian":
            return True
        if form == "erasure":
            return self.config.erasure_case() in HELPER_CASES
        return self.params['setting'] in (HELPER_LOGLOSS, HELPER_DEGRADED)

    def check_helper_rate(self, R_h):
        if self.has_helper() and R_h is None:
            raise UsageError("%s needs a helper rate R_h" % self.curve_name())
        if not self.has_helper() and R_h is not None:
            raise UsageError("%s has no helper link, R_h must be omitted"
                             % self.curve_name())

    def curve_name(self):
        cfg = self.config
        if cfg.source_form == "erasure":
            return cfg.erasure_case()
        if cfg.source_form == "gaussian":
            return "gaussian-%s" % cfg.gaussian_params().ordering
        return "pmf-%s" % self.params['setting']

    def case_params(self):
        cfg = self.config
        if cfg.source_form == "erasure":
            return cfg.erasure.get("params") or {}
        if cfg.source_form == "gaussian":
            return cfg.gaussian_params().to_json()
        return {"setting": self.params['setting'],
                "variables": cfg.names()}

    def evaluate(self, D, R_h=None):
        cfg = self.config
        if cfg.source_form == "gaussian":
            return gaussian_region(cfg.gaussian_params(), R_h, D)
        if cfg.source_form == "erasure":
            return erasure_region(cfg.erasure_case(),
                                  cfg.erasure.get("params"), D, R_h)
        source, names = cfg.source(), cfg.names()
        x, y, z, w = names['x'], names['y'], names['z'], names['w']
        setting = self.params['setting']
        equality = self.params['check_equality']
        tol = self.params['markov_tol']
        self.debug("evaluating %s at D=%g, R_h=%s", setting, D, R_h)
        if setting == OPEN:
            return region_open_markov(source, cfg.dist, D, cfg.solver_config,
                                      x, y, z, check_equality=equality,
                                      markov_tol=tol)
        if setting == CLOSED:
            return region_closed(source, cfg.dist, D, cfg.solver_config,
                                 x, y, z, check_equality=equality)
        if setting == HELPER_LOGLOSS:
            if not cfg.dist.is_log_loss:
                raise UsageError("helper-logloss needs the log-loss "
                                 "distortion")
            return region_helper_logloss(source, R_h, D, cfg.solver_config,
                                         x, y, z, w, markov_tol=tol)
        return region_helper_degraded(source, cfg.dist, R_h, D,
                                      cfg.solver_config, x, y, z, w,
                                      check_equality=equality,
                                      markov_tol=tol)

    def run(self):
        cfg = self.config
        point = self.evaluate(cfg.D, cfg.R_h)
        self.output("%s: %r", self.curve_name(), point)
        curve = RDICurve(self.curve_name(), [point],
                         self.metadata(self.curve_name(), self.case_params()))
        return CommandResult(self.name, cfg, [curve])


class SweepCommand(RegionCommand):
    """
    Curves over ``D_grid`` (one per ``R_h_grid`` value when both grids are
    given) or over ``R_h_grid`` at a fixed ``D``.
    """

    name = "sweep"

    def prepare(self):
        cfg = self.config
        if cfg.D_grid is None and cfg.R_h_grid is None:
            raise UsageError("%s needs D_grid or R_h_grid" % self.name)
        if cfg.D_grid is None and cfg.D is None:
            raise UsageError("an R_h sweep needs a fixed D")
        if cfg.D_grid is not None and cfg.D is not None:
            raise UsageError("give either D or D_grid, not both")
        if cfg.R_h_grid is not None and cfg.R_h is not None:
            raise UsageError("give either R_h or R_h_grid, not both")
        self.check_setting()
        if cfg.R_h_grid is not None:
            self.check_helper_rate(cfg.R_h_grid[0])
        else:
            self.check_helper_rate(cfg.R_h)

    def plan(self):
        """(curve name, key, [(D, R_h), ...]) per curve."""
        cfg, name = self.config, self.curve_name()
        if cfg.D_grid is None:
            return [(name, "R_h", [(cfg.D, r) for r in cfg.R_h_grid])]
        if cfg.R_h_grid is None:
            return [(name, "D", [(d, cfg.R_h) for d in cfg.D_grid])]
        return [("%s_Rh%g" % (name, r), "D", [(d, r) for d in cfg.D_grid])
                for r in cfg.R_h_grid]

    def run(self):
        curves = []
        for name, key, items in self.plan():
            points = self.map_points(lambda item: self.evaluate(*item),
                                     items)
            self.output("%s: %d points by %s", name, len(points), key)
            curves.append(RDICurve(name, points,
                                   self.metadata(name, self.case_params()),
                                   key))
        return CommandResult(self.name, self.config, curves)


class GaussianCommand(SweepCommand):
    """Quadratic Gaussian helper region: a single point or a sweep."""

    name = "gaussian"
    param_def = []

    def prepare(self):
        cfg = self.config
        if cfg.source_form != "gaussian":
            raise UsageError("gaussian needs a gaussian source, got %s"
                             % cfg.source_form)
        if cfg.D_grid is None and cfg.R_h_grid is None:
            if cfg.D is None or cfg.R_h is None:
                raise UsageError("a single Gaussian point needs D and R_h")
            return
        SweepCommand.prepare(self)

    def plan(self):
        cfg = self.config
        if cfg.D_grid is None and cfg.R_h_grid is None:
            return [(self.curve_name(), "D", [(cfg.D, cfg.R_h)])]
        return SweepCommand.plan(self)
