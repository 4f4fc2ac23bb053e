"""Exceptions raised by the secure_rdi library and mapped to CLI exit codes."""


class RDIError(Exception):
    """Base class for every error raised on purpose by secure_rdi."""


class UsageError(RDIError, ValueError):
    """Bad arguments: unknown variable, malformed grid, bad parameters."""


class CapacityError(UsageError):
    """Dense storage or enumeration would exceed the configured limit."""

    def __init__(self, what, cells, limit):
        self.cells = cells
        self.limit = limit
        UsageError.__init__(
            self, "%s needs %d cells, above the limit of %d"
            % (what, cells, limit))


class PreconditionError(RDIError):
    """A structural requirement (Markov chain, factorization) fails."""


class InfeasibleError(RDIError):
    """The requested distortion is below the minimum achievable one."""

    def __init__(self, D, d_min):
        self.D = D
        self.d_min = d_min
        RDIError.__init__(
            self, "distortion %.6g is infeasible (D_min = %.6g)" % (D, d_min))
