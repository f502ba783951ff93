"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Operands have incompatible shapes or dimensions."""


class NotHermitianError(ValueError):
    def __init__(self, deviation):
        super().__init__(f"matrix is not Hermitian (max deviation {deviation:.3e})")
        self.deviation = deviation


class InvalidStateError(ValueError):
    """A state vector, density operator or unitary violates its invariants."""


class ConvergenceError(RuntimeError):
    def __init__(self, message, residual):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class PovmError(ValueError):
    """Candidate POVM failed validation.

    ``reason`` is one of ``"dimension"``, ``"psd"``, ``"identity"``. For
    ``"psd"`` failures ``index`` and ``min_eigenvalue`` name the offending
    element; for ``"identity"`` failures ``residual`` holds the max entry
    deviation of the element sum from the identity.
    """

    def __init__(self, message, reason, index=None, min_eigenvalue=None, residual=None):
        super().__init__(message)
        self.reason = reason
        self.index = index
        self.min_eigenvalue = min_eigenvalue
        self.residual = residual


class SicSearchError(RuntimeError):
    def __init__(self, message, report, fiducial=None):
        super().__init__(message)
        self.report = report
        self.fiducial = fiducial


class SchemaError(ValueError):
    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


class IncoherenceWarning(UserWarning):
    """Probability assignments that no quantum state can reproduce."""
