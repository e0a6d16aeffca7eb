"""Exception types raised by the simulator."""


class DegenerateInputError(ValueError):
    """A matrix or vector carries no energy where the computation needs some."""


class RankDeficiencyError(ValueError):
    """The ZF Gram matrix is singular or too ill-conditioned to invert."""

    def __init__(self, condition_number, limit):
        self.condition_number = condition_number
        self.limit = limit
        super().__init__(
            f"Gram matrix condition number {condition_number:.3e} exceeds {limit:.1e}"
        )


class ConfigError(ValueError):
    """Invalid configuration file content, located by key and line when known."""

    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        where = []
        if key is not None:
            where.append(f"key '{key}'")
        if line is not None:
            where.append(f"line {line}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class TrialError(RuntimeError):
    """A Monte Carlo trial failed; the message carries the trial context."""
