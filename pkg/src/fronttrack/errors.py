"""Exception types shared across the package."""


class DomainError(ValueError):
    """A state left the model's admissible domain (box, positivity, speed signs)."""


class HyperbolicityError(RuntimeError):
    """Eigenvalues are not real and distinct at some state."""


class ConvergenceError(RuntimeError):
    """A Newton solve failed to converge (jump too large or bad data)."""


class RadiusError(ConvergenceError):
    """Requested jump exceeds the declared solvable radius; no solve attempted."""


class ContractViolationError(RuntimeError):
    """A structural contract was violated (wrong-family injection, failed contraction)."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ConfigError(ValueError):
    """Scenario configuration is malformed or out of range."""

    def __init__(self, diagnostics):
        if isinstance(diagnostics, str):
            diagnostics = [diagnostics]
        super().__init__("; ".join(diagnostics))
        self.diagnostics = list(diagnostics)
