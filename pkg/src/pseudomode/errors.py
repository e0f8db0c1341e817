"""Exception types raised across the package."""


class DimensionError(ValueError):
    """Operands have incompatible shapes or subsystem layouts."""


class NotHermitianError(ValueError):
    pass


class NegativeEigenvalueError(ValueError):
    """A supposed density matrix has an eigenvalue below the clamp window."""


class ModelError(ValueError):
    """Spectral model parameters violate a family constraint."""


class IntegrationError(RuntimeError):
    """Time integration failed or produced an unphysical state."""


class ConsistencyError(RuntimeError):
    """Two routes to the same quantity disagree beyond tolerance."""
