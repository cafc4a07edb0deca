"""Exception hierarchy shared by all packages."""


class CrossbarError(Exception):
    """Base class for every error raised by the toolkit."""


class ConfigurationError(CrossbarError, ValueError):
    """Invalid configuration, geometry or activation."""


class DomainError(CrossbarError, ValueError):
    """Input outside the physical domain of a device model."""


class WorkloadError(CrossbarError, ValueError):
    """Malformed or inconsistent workload description."""


class UndefinedMetricError(WorkloadError):
    """A spike-train metric is undefined for the given train."""


class CapacityError(CrossbarError, ValueError):
    """More synapses than the crossbar has cells."""


class PlacementError(CrossbarError, ValueError):
    """A placement does not fit its workload or endurance map."""


class SolverError(CrossbarError, RuntimeError):
    """The linear solve did not reach the requested residual."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
