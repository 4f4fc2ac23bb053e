"""
Rate-distortion solvers.

* conditional Blahut-Arimoto for R_SI-Enc(D), side information at both ends
* multi-start alternating minimisation for the Wyner-Ziv rate R_WZ(D)
* closed forms for erased side information and for log-loss
* the search for the helper auxiliary p(u_h | y)
"""

import logging
import math

import numpy
from scipy.optimize import minimize
from scipy.special import logsumexp, rel_entr, softmax

from secure_rdi.config import Type, Description, DefaultValue, \
    fill_properties
from secure_rdi.errors import InfeasibleError, UsageError
from secure_rdi.core.probability import Alphabet, ConditionalPMF, \
    JointPMF, binary_entropy, entropy, mutual_information, as_names, \
    ERASURE_LABEL

__all__ = ["DistortionSpec", "RDSolverConfig", "SIEqualityReport",
           "SIEncResult", "WynerZivResult", "HelperAuxResult", "ErasedRate",
           "rd_si_enc", "solve_si_enc", "rd_wyner_ziv", "rd_erased_hamming",
           "rd_logloss", "check_si_equality", "helper_aux_optimize",
           "hamming_rate", "erasure_probability", "bayes_reconstruction"]

_LN2 = math.log(2.0)
_BETA_CAP = 2.0 ** 12
_log = logging.getLogger("secure_rdi.solvers")


class DistortionSpec(object):
    """Per-symbol distortion d(x, x_hat)."""

    HAMMING = "hamming"
    MATRIX = "matrix"
    LOG_LOSS = "log-loss"
    KINDS = (HAMMING, MATRIX, LOG_LOSS)

    def __init__(self, kind, matrix=None):
        if kind not in self.KINDS:
            raise UsageError("unknown distortion kind %r (use one of %s)"
                             % (kind, ", ".join(self.KINDS)))
        if kind == self.MATRIX:
            matrix = numpy.asarray(matrix, dtype=float)
            if matrix.ndim != 2 or not numpy.all(numpy.isfinite(matrix)) \
                    or matrix.min() < 0:
                raise UsageError("distortion matrix must be a finite, "
                                 "nonnegative 2-d array")
            matrix.setflags(write=False)
        self.kind = kind
        self._matrix = matrix

    @classmethod
    def hamming(cls):
        return cls(cls.HAMMING)

    @classmethod
    def from_matrix(cls, matrix):
        return cls(cls.MATRIX, matrix)

    @classmethod
    def log_loss(cls):
        return cls(cls.LOG_LOSS)

    @property
    def is_log_loss(self):
        return self.kind == self.LOG_LOSS

    def matrix_for(self, size):
        """d[x][x_hat] for a source alphabet of ``size`` symbols."""
        if self.kind == self.HAMMING:
            return 1.0 - numpy.eye(size)
        if self.kind == self.MATRIX:
            if self._matrix.shape[0] != size:
                raise UsageError("distortion matrix has %d rows for a source "
                                 "of %d symbols" % (self._matrix.shape[0],
                                                    size))
            return self._matrix
        raise UsageError("log-loss has no distortion matrix")

    def to_json(self):
        if self.kind == self.MATRIX:
            return {"matrix": self._matrix.tolist()}
        return self.kind

    @classmethod
    def from_json(cls, data):
        if isinstance(data, dict):
            if "matrix" not in data:
                raise UsageError("distortion object needs a 'matrix'")
            return cls.from_matrix(data["matrix"])
        return cls(data)

    def __repr__(self):
        return "DistortionSpec(%s)" % self.kind


class RDSolverConfig(object):
    """Iteration limits, tolerances and seeding shared by the solvers."""

    solver_properties = {
        'max_iterations': {Type: int, DefaultValue: 5000,
                           Description: 'Iterations per multiplier value'},
        'tol': {Type: float, DefaultValue: 1e-7,
                Description: 'Rate change per iteration that stops a run'},
        'distortion_tol': {Type: float, DefaultValue: 1e-6,
                           Description: 'Tolerance on the distortion target'},
        'restarts': {Type: int, DefaultValue: 32,
                     Description: 'Random starts of non-convex searches'},
        'seed': {Type: int, DefaultValue: 0,
                 Description: 'Base seed of per-restart random streams'},
        'equality_tol': {Type: float, DefaultValue: 1e-3,
                         Description: 'Largest Wyner-Ziv gap accepted as '
                                      'equality'},
        'closed_forms': {Type: bool, DefaultValue: True,
                         Description: 'Use exact laws for recognised '
                                      'source structures'},
    }

    def __init__(self, **kwargs):
        values = fill_properties(self.solver_properties, kwargs, "solver")
        if values['max_iterations'] < 1:
            raise UsageError("max_iterations must be >= 1")
        if values['tol'] <= 0 or values['distortion_tol'] <= 0:
            raise UsageError("solver tolerances must be > 0")
        if values['restarts'] < 1:
            raise UsageError("restarts must be >= 1")
        self.__dict__.update(values)

    @classmethod
    def from_dict(cls, data):
        return cls(**(data or {}))

    def to_json(self):
        return {name: getattr(self, name) for name in self.solver_properties}

    def rng(self, restart):
        return numpy.random.default_rng([self.seed, restart])

    def __repr__(self):
        return "RDSolverConfig(%s)" % ", ".join(
            "%s=%r" % item for item in sorted(self.to_json().items()))


def _resolve(source, x, si):
    x = source.names[0] if x is None else x
    si = tuple(n for n in source.names if n != x) if si is None \
        else as_names(si)
    return x, si


def _source_matrix(source, x, si):
    """p(x, s) with the side information flattened to one axis."""
    if si:
        return source.grouped(x, si)
    return source.array(x).reshape(-1, 1)


def bayes_reconstruction(p_xc, d):
    """Distortion-minimising x_hat per column c, lowest index on ties."""
    cost = numpy.einsum("xc,xk->ck", p_xc, d)
    return numpy.argmin(cost, axis=1)


def _d_min(p_xs, d):
    return float(p_xs.sum(axis=1) @ d.min(axis=1))


def _d_max(p_xs, d):
    return float(numpy.einsum("xs,xk->sk", p_xs, d).min(axis=1).sum())


def hamming_rate(p_x, D):
    """
    Hamming rate-distortion law of a single source, or None.

    Exact for binary sources and for uniform sources; other shapes have
    no elementary form.
    """
    p_x = numpy.asarray(p_x, dtype=float)
    k = p_x.size
    if k == 1 or p_x.max() >= 1.0:
        return 0.0
    D = min(max(float(D), 0.0), 1.0)
    if k == 2:
        if D >= min(p_x):
            return 0.0
        return binary_entropy(p_x[1]) - binary_entropy(D)
    if numpy.allclose(p_x, 1.0 / k, rtol=0, atol=1e-14):
        if D >= 1.0 - 1.0 / k:
            return 0.0
        return math.log2(k) - binary_entropy(D) - D * math.log2(k - 1)
    return None


def _hamming_test_channel(p_x, D):
    """Forward test channel p(x_hat | x) achieving ``hamming_rate``."""
    k = p_x.size
    if k == 2 and not numpy.isclose(p_x[0], 0.5, atol=1e-14):
        q = p_x[1]
        r = (q - D) / (1.0 - 2.0 * D)
        p_v = numpy.array([1.0 - r, r])
        backward = numpy.array([[1.0 - D, D], [D, 1.0 - D]])  # p(x | v)
        joint = p_v[:, None] * backward
        return (joint / joint.sum(axis=0)).T
    return numpy.where(numpy.eye(k) > 0, 1.0 - D, D / (k - 1))


def erasure_probability(p_xs, tol=1e-12):
    """
    p_e when the side information is an erased copy of X, else None.

    Each side-information cell must either pin X down or leave the prior
    of X unchanged; p_e is the total mass of the second kind.
    """
    p_x = p_xs.sum(axis=1)
    p_s = p_xs.sum(axis=0)
    p_e = 0.0
    for s in numpy.flatnonzero(p_s > 0):
        post = p_xs[:, s] / p_s[s]
        if numpy.max(numpy.abs(post - p_x)) <= tol:
            p_e += p_s[s]
        elif post.max() < 1.0 - tol:
            return None
    return float(p_e)


class SIEncResult(object):
    """Conditional Blahut-Arimoto outcome at one distortion target."""

    def __init__(self, rate, distortion, beta, channel, d_min, d_max):
        self.rate = rate
        self.distortion = distortion
        self.beta = beta
        self.channel = channel
        self.d_min = d_min
        self.d_max = d_max

    def __repr__(self):
        return "SIEncResult(rate=%.6g, D=%.6g, beta=%.4g)" % (
            self.rate, self.distortion, self.beta)


class _BlahutArimoto(object):
    """Weighted BA over side-information slices with a global multiplier."""

    def __init__(self, p_xs, d, cfg):
        keep = p_xs.sum(axis=0) > 0
        p_xs = p_xs[:, keep]
        self.p_s = p_xs.sum(axis=0)
        self.p_x_s = (p_xs / self.p_s).T          # (S, X)
        self.d = d
        self.cfg = cfg
        self.q = numpy.full((self.p_s.size, d.shape[1]), 1.0 / d.shape[1])

    def run(self, beta):
        log_q = numpy.log(self.q)
        rate = distortion = numpy.inf
        for iteration in range(self.cfg.max_iterations):
            log_w = log_q[:, None, :] - beta * self.d[None, :, :]
            cond = numpy.exp(log_w - logsumexp(log_w, axis=2, keepdims=True))
            q = numpy.einsum("sx,sxk->sk", self.p_x_s, cond)
            weights = self.p_s[:, None] * self.p_x_s
            new_rate = float(numpy.einsum(
                "sx,sxk->", weights,
                rel_entr(cond, q[:, None, :]))) / _LN2
            new_distortion = float(numpy.einsum(
                "sx,sxk,xk->", weights, cond, self.d))
            converged = (abs(new_rate - rate) < self.cfg.tol and
                         abs(new_distortion - distortion) < self.cfg.tol)
            rate, distortion = new_rate, new_distortion
            with numpy.errstate(divide="ignore"):
                log_q = numpy.log(q)
            if converged:
                break
        self.q = q
        return max(rate, 0.0), distortion, cond

    def evaluate(self, cond):
        """Rate and distortion of a test channel cond[s, x, x_hat]."""
        q = numpy.einsum("sx,sxk->sk", self.p_x_s, cond)
        weights = self.p_s[:, None] * self.p_x_s
        terms = numpy.where(weights[:, :, None] > 0,
                            rel_entr(cond, q[:, None, :]), 0.0)
        rate = float(numpy.einsum("sx,sxk->", weights, terms)) / _LN2
        distortion = float(numpy.einsum("sx,sxk,xk->", weights, cond,
                                        self.d))
        return max(rate, 0.0), distortion

    def constant_channel(self):
        """Zero-rate channel: the best fixed x_hat for each s."""
        cost = self.p_x_s @ self.d
        best = numpy.eye(self.d.shape[1])[numpy.argmin(cost, axis=1)]
        return numpy.repeat(best[:, None, :], self.p_x_s.shape[1], axis=1)


def solve_si_enc(source, dist, D, cfg=None, x=None, si=None):
    """Conditional Blahut-Arimoto with bisection on the multiplier."""
    cfg = cfg or RDSolverConfig()
    x, si = _resolve(source, x, si)
    if D < 0:
        raise UsageError("distortion must be >= 0, got %g" % D)
    p_xs = _source_matrix(source, x, si)
    d = dist.matrix_for(p_xs.shape[0])
    d_min, d_max = _d_min(p_xs, d), _d_max(p_xs, d)
    if D < d_min - cfg.distortion_tol:
        raise InfeasibleError(D, d_min)
    ba = _BlahutArimoto(p_xs, d, cfg)
    if D >= d_max - cfg.distortion_tol:
        return SIEncResult(0.0, d_max, 0.0, ba.constant_channel(),
                           d_min, d_max)

    beta_hi = 1.0
    r_hi, d_hi, c_hi = ba.run(beta_hi)
    while d_hi > D and beta_hi < _BETA_CAP:
        beta_hi *= 2.0
        r_hi, d_hi, c_hi = ba.run(beta_hi)
    if d_hi > D + cfg.distortion_tol:
        _log.debug("multiplier cap reached at D=%g (reached %g)", D, d_hi)
        return SIEncResult(r_hi, d_hi, beta_hi, c_hi, d_min, d_max)
    beta_lo, d_lo, c_lo = 0.0, d_max, ba.constant_channel()
    for step in range(100):
        if abs(d_hi - D) <= cfg.distortion_tol:
            break
        beta = 0.5 * (beta_lo + beta_hi)
        rate, distortion, cond = ba.run(beta)
        if distortion > D:
            beta_lo, d_lo, c_lo = beta, distortion, cond
        else:
            beta_hi, r_hi, d_hi, c_hi = beta, rate, distortion, cond
    rate, distortion, channel = r_hi, d_hi, c_hi
    if d_hi < D < d_lo:
        # mix the bracketing channels so the distortion lands on D
        weight = (d_lo - D) / (d_lo - d_hi)
        channel = weight * c_hi + (1.0 - weight) * c_lo
        rate, distortion = ba.evaluate(channel)
    _log.debug("R_SI-Enc(%g) = %.9g at beta=%.6g", D, rate, beta_hi)
    return SIEncResult(rate, distortion, beta_hi, channel, d_min, d_max)


def rd_logloss(source, D, x=None, si=None):
    if D < 0:
        raise UsageError("distortion must be >= 0, got %g" % D)
    x, si = _resolve(source, x, si)
    return max(entropy(source, x, si) - D, 0.0)


def rd_si_enc(source, dist, D, cfg=None, x=None, si=None):
    """R_SI-Enc(D) in bits: min I(X; X_hat | SI) with E d <= D."""
    cfg = cfg or RDSolverConfig()
    x, si = _resolve(source, x, si)
    if dist.is_log_loss:
        return rd_logloss(source, D, x, si)
    if D < 0:
        raise UsageError("distortion must be >= 0, got %g" % D)
    if cfg.closed_forms and dist.kind == DistortionSpec.HAMMING:
        p_xs = _source_matrix(source, x, si)
        p_e = erasure_probability(p_xs)
        if p_e is not None:
            if p_e == 0.0:
                return 0.0
            rate = hamming_rate(p_xs.sum(axis=1), D / p_e)
            if rate is not None:
                return p_e * rate
    return solve_si_enc(source, dist, D, cfg, x, si).rate


class ErasedRate(object):

    def __init__(self, rate, saturated):
        self.rate = rate
        self.saturated = saturated

    def __float__(self):
        return float(self.rate)

    def __repr__(self):
        return "ErasedRate(%.9g, saturated=%s)" % (self.rate, self.saturated)


def rd_erased_hamming(p_source, p_e, D, cfg=None):
    """p_e times the Hamming rate of X at distortion D / p_e."""
    p_x = p_source.probs.ravel() if isinstance(p_source, JointPMF) \
        else numpy.asarray(p_source, dtype=float).ravel()
    if not 0.0 <= p_e <= 1.0:
        raise UsageError("erasure probability must be in [0, 1]")
    if D < 0:
        raise UsageError("distortion must be >= 0, got %g" % D)
    if D > p_e:
        _log.warning("D=%g exceeds p_e=%g, rate saturates at 0", D, p_e)
        return ErasedRate(0.0, True)
    if p_e == 0.0:
        return ErasedRate(0.0, False)
    rate = hamming_rate(p_x, D / p_e)
    if rate is None:
        marginal = JointPMF.from_vector("X", p_x)
        rate = solve_si_enc(marginal, DistortionSpec.hamming(), D / p_e,
                            cfg, "X", ()).rate
    return ErasedRate(p_e * rate, False)


class WynerZivResult(object):
    """
    Best Wyner-Ziv code found: rate, test channel p(v|x) and x_hat(v, si).

    ``restart_rates`` holds each restart's rate and ``best_rates`` the
    running minimum. Numerical results are upper bounds on R_WZ(D).
    """

    def __init__(self, rate, distortion, channel, reconstruction, method,
                 restart_rates=(), x=None, si=()):
        self.rate = rate
        self.distortion = distortion
        self.channel = channel
        self.reconstruction = reconstruction
        self.method = method
        self.restart_rates = list(restart_rates)
        self.best_rates = list(numpy.minimum.accumulate(restart_rates)) \
            if len(self.restart_rates) else []
        self.x = x
        self.si = si

    def to_json(self):
        return {"rate": self.rate, "distortion": self.distortion,
                "method": self.method, "restart_rates": self.restart_rates,
                "channel": self.channel.to_json(),
                "reconstruction": None if self.reconstruction is None
                else self.reconstruction.tolist()}

    def __repr__(self):
        return "WynerZivResult(rate=%.6g, D=%.6g, method=%s)" % (
            self.rate, self.distortion, self.method)


def _evaluate_channel(p_xs, w, d):
    """Rate I(X;V|S), Bayes reconstruction and distortion of p(v|x)."""
    joint = p_xs[:, None, :] * w[:, :, None]                 # (X, V, S)
    p_vs = joint.sum(axis=0)
    p_s = p_xs.sum(axis=0)
    with numpy.errstate(divide="ignore", invalid="ignore"):
        q = numpy.where(p_s > 0, p_vs / p_s, 0.0)            # q(v|s)
    rate = float(numpy.einsum("xs,xvs->", p_xs,
                              rel_entr(w[:, :, None], q[None, :, :]))) / _LN2
    cost = numpy.einsum("xvs,xk->vsk", joint, d)
    table = numpy.argmin(cost, axis=2)
    distortion = float(numpy.take_along_axis(
        cost, table[:, :, None], axis=2).sum())
    return max(rate, 0.0), distortion, table, q


class _AlternatingWZ(object):
    """
    Alternating minimisation of I(X;V|S) + beta * E d(X, x_hat(V,S)).

    The three blocks are the reconstruction table, the variational
    q(v|s) and the channel p(v|x); each step can only lower the
    objective.
    """

    def __init__(self, p_xs, d, cfg):
        self.p_xs = p_xs
        self.d = d
        self.cfg = cfg
        p_x = p_xs.sum(axis=1)
        with numpy.errstate(divide="ignore", invalid="ignore"):
            self.p_s_x = numpy.where(p_x[:, None] > 0, p_xs / p_x[:, None],
                                     0.0)

    def run(self, w, beta):
        objective = numpy.inf
        for iteration in range(self.cfg.max_iterations):
            rate, distortion, table, q = _evaluate_channel(self.p_xs, w,
                                                           self.d)
            value = rate + beta * distortion / _LN2
            if objective - value < self.cfg.tol * 1e-2:
                break
            objective = value
            with numpy.errstate(divide="ignore"):
                log_q = numpy.log(q)                          # (V, S)
            loss = self.d[:, table]                           # (X, V, S)
            score = log_q[None, :, :] - beta * loss
            weighted = numpy.where(self.p_s_x[:, None, :] > 0,
                                   self.p_s_x[:, None, :] * score, 0.0)
            log_w = weighted.sum(axis=2)
            w = numpy.exp(log_w - logsumexp(log_w, axis=1, keepdims=True))
        rate, distortion, table, q = _evaluate_channel(self.p_xs, w, self.d)
        return w, rate, distortion


def _time_share(point_a, point_b, D):
    """Mix a feasible point a (d_a <= D) with b (d_b > D) to meet D."""
    w_a, r_a, d_a = point_a
    w_b, r_b, d_b = point_b
    lam = (d_b - D) / (d_b - d_a)
    return numpy.hstack([lam * w_a, (1.0 - lam) * w_b])


def _restart(solver, rng, D, v_size):
    w = rng.dirichlet(numpy.ones(v_size), size=solver.p_xs.shape[0])
    tol = solver.cfg.distortion_tol
    beta_hi = 1.0
    w, rate, distortion = solver.run(w, beta_hi)
    while distortion > D + tol and beta_hi < _BETA_CAP:
        beta_hi *= 2.0
        w, rate, distortion = solver.run(w, beta_hi)
    if distortion > D + tol:
        return None
    feasible = (w, rate, distortion)
    above = None
    beta_lo = 0.0
    for step in range(60):
        if D - feasible[2] <= tol:
            break
        beta = 0.5 * (beta_lo + beta_hi)
        w_mid, r_mid, d_mid = solver.run(feasible[0], beta)
        if d_mid <= D + tol:
            beta_hi = beta
            if r_mid <= feasible[1]:
                feasible = (w_mid, r_mid, d_mid)
        else:
            beta_lo = beta
            if above is None or d_mid < above[2]:
                above = (w_mid, r_mid, d_mid)
        if beta_hi - beta_lo < 1e-9 * beta_hi:
            break
    if feasible[2] < D - tol and above is not None and above[1] < feasible[1]:
        return _time_share(feasible, above, D)
    return feasible[0]


def _wz_result(source, x, si, d, w, method, v_labels=None,
               restart_rates=(), p_xs=None):
    p_xs = _source_matrix(source, x, si) if p_xs is None else p_xs
    rate, distortion, table, _ = _evaluate_channel(p_xs, w, d)
    v_alphabet = Alphabet(w.shape[1], v_labels)
    channel = ConditionalPMF([(x, source.alphabet(x))], [("V", v_alphabet)],
                             w / w.sum(axis=1, keepdims=True), tol=1e-9)
    return WynerZivResult(rate, distortion, channel, table, method,
                          restart_rates, x, si)


def rd_wyner_ziv(source, dist, D, cfg=None, x=None, si=None):
    """
    Wyner-Ziv rate at distortion D by multi-start alternating search.

    Returns a ``WynerZivResult`` whose channel is V|X with |V| <= |X| + 1
    (twice that when a restart time-shares two solutions).
    """
    cfg = cfg or RDSolverConfig()
    x, si = _resolve(source, x, si)
    if D < 0:
        raise UsageError("distortion must be >= 0, got %g" % D)
    k = source.alphabet(x).size

    if dist.is_log_loss:
        h = entropy(source, x, si)
        labels = source.alphabet(x).labels + (ERASURE_LABEL,)
        alpha = 1.0 if h <= 0 else min(D / h, 1.0)
        w = numpy.hstack([(1.0 - alpha) * numpy.eye(k),
                          numpy.full((k, 1), alpha)])
        channel = ConditionalPMF([(x, source.alphabet(x))],
                                 [("V", Alphabet(k + 1, labels))], w)
        joint = source.extend(channel)
        return WynerZivResult(mutual_information(joint, x, "V", si),
                              entropy(joint, x, ("V",) + si), channel, None,
                              "log-loss")

    p_xs = _source_matrix(source, x, si)
    d = dist.matrix_for(k)
    d_min, d_max = _d_min(p_xs, d), _d_max(p_xs, d)
    if D < d_min - cfg.distortion_tol:
        raise InfeasibleError(D, d_min)
    if D >= d_max - cfg.distortion_tol:
        return _wz_result(source, x, si, d, numpy.ones((k, 1)), "constant",
                          p_xs=p_xs)

    if cfg.closed_forms and dist.kind == DistortionSpec.HAMMING:
        p_e = erasure_probability(p_xs)
        p_x = p_xs.sum(axis=1)
        if p_e is not None and p_e > 0 and \
                hamming_rate(p_x, D / p_e) is not None:
            w = _hamming_test_channel(p_x, D / p_e)
            return _wz_result(source, x, si, d, w, "erasure",
                              source.alphabet(x).labels, p_xs=p_xs)

    solver = _AlternatingWZ(p_xs, d, cfg)
    best, rates = None, []
    for restart in range(cfg.restarts):
        w = _restart(solver, cfg.rng(restart), D, k + 1)
        if w is None:
            w = numpy.hstack([numpy.eye(k), numpy.zeros((k, 1))])
        rate, distortion, _, _ = _evaluate_channel(p_xs, w, d)
        rates.append(rate)
        _log.debug("Wyner-Ziv restart %d: rate %.9g at D=%.9g",
                   restart, rate, distortion)
        if best is None or rate < best[1]:
            best = (w, rate)
    return _wz_result(source, x, si, d, best[0], "alternating",
                      restart_rates=rates, p_xs=p_xs)


class SIEqualityReport(object):
    """Side-by-side R_WZ and R_SI-Enc on a distortion grid."""

    def __init__(self, grid, r_wz, r_si_enc, tolerance, wz_results):
        self.grid = list(grid)
        self.r_wz = list(r_wz)
        self.r_si_enc = list(r_si_enc)
        self.tolerance = tolerance
        self.max_gap = max(a - b for a, b in zip(self.r_wz, self.r_si_enc))
        self.verdict = self.max_gap <= tolerance
        self.wz_results = list(wz_results)

    def v_star(self, index=0):
        """Achieving V channel at grid point ``index``."""
        return self.wz_results[index].channel

    def to_json(self):
        return {"grid": self.grid, "r_wz": self.r_wz,
                "r_si_enc": self.r_si_enc, "max_gap": self.max_gap,
                "tolerance": self.tolerance, "verdict": self.verdict,
                "v_star": [result.to_json() for result in self.wz_results]}

    def __repr__(self):
        return "SIEqualityReport(verdict=%s, max_gap=%.3g)" % (
            self.verdict, self.max_gap)


def check_si_equality(source, dist, D_grid, cfg=None, x=None, si=None):
    """Does side information at the encoder leave R(D) unchanged?"""
    cfg = cfg or RDSolverConfig()
    D_grid = list(D_grid)
    if not D_grid:
        raise UsageError("distortion grid is empty")
    r_wz, r_si, results = [], [], []
    for D in D_grid:
        si_rate = rd_si_enc(source, dist, D, cfg, x, si)
        wz = rd_wyner_ziv(source, dist, D, cfg, x, si)
        if wz.rate < si_rate - cfg.equality_tol:
            _log.warning("R_WZ(%g)=%.6g below R_SI-Enc=%.6g", D, wz.rate,
                         si_rate)
        r_si.append(si_rate)
        r_wz.append(wz.rate)
        results.append(wz)
    report = SIEqualityReport(D_grid, r_wz, r_si, cfg.equality_tol, results)
    _log.info("side-information equality: %s (max gap %.3g)",
              report.verdict, report.max_gap)
    return report


class HelperAuxResult(object):

    def __init__(self, channel, objective, rate):
        self.channel = channel
        self.objective = objective
        self.rate = rate

    def __repr__(self):
        return "HelperAuxResult(H=%.6g, I=%.6g)" % (self.objective,
                                                    self.rate)


class _HelperObjective(object):
    """H(X|U_h,Z) and I(U_h;Y|Z) as functions of p(u_h|y)."""

    def __init__(self, p_xyz, u_size):
        self.p_xyz = p_xyz
        self.p_yz = p_xyz.sum(axis=0)
        self.h_z = _bits(self.p_yz.sum(axis=0))
        self.h_yz = _bits(self.p_yz)
        self.shape = (p_xyz.shape[1], u_size)

    def channel(self, logits):
        return softmax(numpy.reshape(logits, self.shape), axis=1)

    def measures(self, w):
        p_xuz = numpy.einsum("xyz,yu->xuz", self.p_xyz, w)
        p_uz = p_xuz.sum(axis=0)
        p_uyz = numpy.einsum("yz,yu->uyz", self.p_yz, w)
        h_cond = _bits(p_xuz) - _bits(p_uz)
        rate = (_bits(p_uz) - self.h_z) - (_bits(p_uyz) - self.h_yz)
        return h_cond, max(rate, 0.0)


def _bits(array):
    return float(-numpy.sum(rel_entr(array, 1.0))) / _LN2


def helper_aux_optimize(source, R_h, cfg=None, x="X", y="Y", z="Z"):
    """
    Minimise H(X|U_h,Z) over p(u_h|y) subject to I(U_h;Y|Z) <= R_h.

    |U_h| = |Y| + 2. Seeds: the constant channel, the identity when it
    fits the budget, the erasure family meeting the budget, plus random
    Dirichlet starts, each refined by SLSQP on softmax logits.
    """
    cfg = cfg or RDSolverConfig()
    if R_h < 0:
        raise UsageError("helper rate must be >= 0, got %g" % R_h)
    p_xyz = source.grouped(x, y, as_names(z))
    k_y = p_xyz.shape[1]
    u_size = k_y + 2
    target = _HelperObjective(p_xyz, u_size)
    h_y_given_z = _bits(target.p_yz) - target.h_z

    seeds = []
    constant = numpy.zeros((k_y, u_size))
    constant[:, 0] = 1.0
    seeds.append(constant)
    if h_y_given_z <= R_h + 1e-12:
        seeds.append(numpy.eye(k_y, u_size))
    elif h_y_given_z > 0:
        keep = R_h / h_y_given_z
        erasure = keep * numpy.eye(k_y, u_size)
        erasure[:, k_y] = 1.0 - keep
        seeds.append(erasure)

    def feasible(w):
        return target.measures(w)[1] <= R_h + 1e-9

    candidates = list(seeds)
    starts = [numpy.log(seed + 1e-6) for seed in seeds[1:]]
    starts += [numpy.log(cfg.rng(r).dirichlet(numpy.ones(u_size), size=k_y))
               for r in range(cfg.restarts)]
    constraint = {"type": "ineq",
                  "fun": lambda t: R_h - target.measures(
                      target.channel(t))[1]}
    for start in starts:
        result = minimize(lambda t: target.measures(target.channel(t))[0],
                          start.ravel(), method="SLSQP",
                          constraints=[constraint],
                          options={"maxiter": 200, "ftol": 1e-12})
        candidates.append(target.channel(result.x))

    best = None
    for w in candidates:
        if not feasible(w):
            continue
        h_cond, rate = target.measures(w)
        if best is None or h_cond < best[1] - 1e-15:
            best = (w, h_cond, rate)
    w, h_cond, rate = best
    channel = ConditionalPMF([(n, source.alphabet(n)) for n in as_names(y)],
                             [("U_h", Alphabet(u_size))],
                             w / w.sum(axis=1, keepdims=True), tol=1e-9)
    _log.debug("helper auxiliary at R_h=%g: H(X|U_h,Z)=%.6g, I=%.6g",
               R_h, h_cond, rate)
    return HelperAuxResult(channel, h_cond, rate)
