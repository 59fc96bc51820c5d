"""Exception types shared across the package."""


class SingularMatrixError(ArithmeticError):
    """Matrix failed the conditioning test; the channel draw is unusable."""


class DefectiveMatrixError(ArithmeticError):
    """Repeated eigenvalue without a second independent eigenvector."""


class ZeroVectorError(ValueError):
    """A direction was requested from a (numerically) zero vector."""


class ConfigError(ValueError):
    """A scenario or experiment configuration violates an invariant."""


class ValidationError(ConfigError):
    """Config parsed fine but the field values are inconsistent."""


class ParseError(ValueError):
    """Config file is not well-formed."""


class RewardRangeError(ValueError):
    """Reward fed to a policy lies outside [0, 1]."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of the function."""


class UninitializedArmError(RuntimeError):
    """Index evaluated for an arm that was never pulled."""


class ScenarioMismatchError(ValueError):
    """Trace and statistics come from different scenarios."""
