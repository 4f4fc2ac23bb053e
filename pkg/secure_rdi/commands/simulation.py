"""Scheme simulation and binning-lemma verification commands."""

from secure_rdi.errors import UsageError
from secure_rdi.core.regions import AuxChannelSet
from secure_rdi.core.solvers import rd_wyner_ziv
from secure_rdi.sim.binning import BinningExperiment, \
    codeword_binning_entropy, exact_binning_entropy
from secure_rdi.sim.scheme import MAX_SIM_N, simulate_scheme_open
from secure_rdi.commands.base import Command, CommandResult, \
    increasing_grid

__all__ = ["SimulateCommand", "VerifyLemmaCommand"]

SEQUENCE = "sequence"
CODEWORD = "codeword"


class SimulateCommand(Command):
    """
    Simulate the open-switch scheme on ``codebooks`` codebooks.

    Without an ``aux`` parameter the Wyner-Ziv test channel at ``D`` is
    used, with U constant.
    """

    name = "simulate"

    param_def = [
        ['n', int, 4, 'Blocklength, 1 to %d' % MAX_SIM_N],
        ['eps', float, 0.5, 'Robust typicality parameter'],
        ['trials', int, 10000, 'Monte Carlo trials per codebook'],
        ['slack', float, 0.05, 'Rate margin added to every codebook rate'],
        ['codebooks', int, 1, 'Codebooks drawn with seeds seed, seed+1, ...'],
        ['aux', dict, None, 'Auxiliary channel set document'],
    ]

    columns = ["seed", "n", "key_bins", "exact_distortion",
               "empirical_distortion", "distortion_stderr",
               "single_letter_distortion", "leakage", "leakage_unscrambled",
               "leakage_padded", "scrambled", "encoder_failure_rate",
               "decoder_error_rate", "list_exponent", "block_entropy_rate",
               "amplification_holds"]

    def prepare(self):
        cfg = self.config
        if cfg.source_form == "gaussian":
            raise UsageError("simulate needs a discrete source")
        if self.params['aux'] is None and cfg.D is None:
            raise UsageError("simulate needs an aux channel set or D")
        if self.params['codebooks'] < 1:
            raise UsageError("codebooks must be >= 1")
        if self.params['eps'] <= 0:
            raise UsageError("eps must be > 0")

    def auxiliaries(self, source):
        cfg, names = self.config, self.config.names()
        if self.params['aux'] is not None:
            return AuxChannelSet.from_json(self.params['aux'])
        wz = rd_wyner_ziv(source, cfg.dist, cfg.D, cfg.solver_config,
                          names['x'], names['y'])
        self.info("using the Wyner-Ziv channel at D=%g: %r", cfg.D, wz)
        return AuxChannelSet.from_v(wz.channel)

    def run(self):
        cfg, names, p = self.config, self.config.names(), self.params
        source = cfg.source()
        aux = self.auxiliaries(source)
        seeds = [cfg.seed + i for i in range(p['codebooks'])]

        def simulate(seed):
            return simulate_scheme_open(
                source, aux, p['n'], p['eps'], seed, p['trials'], cfg.dist,
                p['slack'], names['x'], names['y'], names['z'])

        reports = self.map_points(simulate, seeds)
        rows = [[getattr(r, c) for c in self.columns] for r in reports]
        result = CommandResult(self.name, cfg,
                               tables={"simulation": (self.columns, rows)},
                               details={"aux": aux.to_json(),
                                        "reports": [r.to_json()
                                                    for r in reports]})
        for r in reports:
            self.output("seed %d: %r", r.seed, r)
            if r.leakage > r.leakage_unscrambled + 1e-12:
                result.flag("seed %d: scrambling raised the leakage" % r.seed)
            if r.key_bins > 1 and not r.scrambled:
                result.flag("seed %d: the pad raised the leakage and was "
                            "dropped" % r.seed)
            if not r.amplification_holds:
                result.flag("seed %d: amplification relation fails" % r.seed)
            gap = abs(r.empirical_distortion - r.exact_distortion)
            if gap > 3 * r.distortion_stderr + 1e-12:
                result.flag("seed %d: empirical distortion %.3g sigma off"
                            % (r.seed, gap / max(r.distortion_stderr,
                                                 1e-300)))
        return result


class VerifyLemmaCommand(Command):
    """Exact entropies of binned sequences or binned codebooks."""

    name = "verify-lemma"

    param_def = [
        ['lemma', str, SEQUENCE,
         'sequence: bin the binned variable; codeword: bin a random '
         'codebook of the binned variable'],
        ['n', int, 8, 'Blocklength'],
        ['R_K_grid', [float], [0.0, 0.1, 0.2, 0.3, 0.4, 0.5], 'Key rates'],
        ['codebooks', int, 5, 'Independent seeds seed, seed+1, ...'],
        ['R_tilde', float, None, 'Codebook rate of the codeword lemma'],
        ['eps', float, 0.5, 'Robust typicality parameter'],
        ['binned', str, 'Y', 'Binned variable'],
        ['observer', str, 'W', 'Variable seen together with the key'],
        ['delta_cap', float, 0.15,
         'Largest accepted excess over the bound per symbol'],
    ]

    columns = ["seed", "R_K", "bins", "value", "bound", "slack", "delta"]

    def prepare(self):
        p = self.params
        if self.config.source_form == "gaussian":
            raise UsageError("verify-lemma needs a discrete source")
        if p['lemma'] not in (SEQUENCE, CODEWORD):
            raise UsageError("unknown lemma %r (use %s or %s)"
                             % (p['lemma'], SEQUENCE, CODEWORD))
        increasing_grid("R_K_grid", p['R_K_grid'])
        if p['lemma'] == CODEWORD and p['R_tilde'] is None:
            raise UsageError("the codeword lemma needs R_tilde")
        if p['codebooks'] < 1:
            raise UsageError("codebooks must be >= 1")

    def measure(self, source, seed, R_K):
        p = self.params
        if p['lemma'] == SEQUENCE:
            exp = BinningExperiment(source, p['n'], R_K, seed, p['binned'],
                                    p['observer'])
            return exact_binning_entropy(exp)
        return codeword_binning_entropy(p['n'], p['R_tilde'], R_K, source,
                                        seed, p['eps'], p['binned'],
                                        p['observer'])

    def run(self):
        cfg, p = self.config, self.params
        source = cfg.source()
        items = [(cfg.seed + i, R_K) for i in range(p['codebooks'])
                 for R_K in p['R_K_grid']]
        reports = self.map_points(lambda item: self.measure(source, *item),
                                  items)
        rows = [[seed, R_K, r.bins, r.value, r.bound, r.slack, r.delta]
                for (seed, R_K), r in zip(items, reports)]
        result = CommandResult(self.name, cfg,
                               tables={"lemma": (self.columns, rows)},
                               details={"lemma": p['lemma'],
                                        "reports": [r.to_json()
                                                    for r in reports]})
        by_seed = {}
        for (seed, R_K), r in zip(items, reports):
            if r.delta > p['delta_cap']:
                result.flag("seed %d, R_K=%g: excess %.3g above %.3g"
                            % (seed, R_K, r.delta, p['delta_cap']))
            by_seed.setdefault(seed, []).append((R_K, r.value))
        if p['lemma'] == SEQUENCE:
            for seed, values in sorted(by_seed.items()):
                for (_, a), (R_K, b) in zip(values, values[1:]):
                    if b > a + 1e-9:
                        result.flag("seed %d: entropy grows at R_K=%g"
                                    % (seed, R_K))
                        break
        self.output("%d lemma measurements, %d flagged", len(rows),
                    len(result.violations))
        return result
