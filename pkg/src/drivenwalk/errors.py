"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid experiment configuration.

    ``path`` is a dotted location inside the config document, e.g.
    ``"injection.phase_mode"``, so callers can point at the offending field.
    """

    def __init__(self, path, problem):
        self.path = path
        self.problem = problem
        super().__init__(f"{path}: {problem}")


class NumericalIntegrityError(RuntimeError):
    """A numerical self-check failed (non-unitary operator, bad
    reconstruction, boundary leakage). Carries the offending residual."""

    def __init__(self, message, residual=None):
        self.residual = residual
        if residual is not None:
            message = f"{message} (residual {residual:.3e})"
        super().__init__(message)


class UndefinedGapError(ValueError):
    """Spectral gap requested but every frequency coincides with the
    reference."""
