"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid parameters or configuration; the run never starts."""


class FeasibilityError(ConfigError):
    """Controller thresholds violate the convergence conditions."""

    def __init__(self, violations, message=None):
        self.violations = tuple(violations)
        super().__init__(message or "infeasible thresholds: " + "; ".join(self.violations))


class SimulationError(RuntimeError):
    """Numerical blow-up during integration."""
