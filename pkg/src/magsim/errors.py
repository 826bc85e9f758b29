"""Exception hierarchy shared by all magsim modules."""


class MagsimError(Exception):
    """Base class; ``category`` is what the CLI reports on stderr."""

    category = "error"


class DomainError(MagsimError, ValueError):
    category = "domain"


class ConfigError(MagsimError, ValueError):
    """Invalid configuration (parse failure or violated invariant)."""

    category = "config"


class IntegrationConfigError(ConfigError):
    """Step size does not resolve the fastest timescale of the ODE."""


class DarkPortError(MagsimError, ArithmeticError):
    """Postselection probability at or below the rejection floor."""

    category = "dark-port"


class NoSignalError(MagsimError, ArithmeticError):
    category = "no-signal"
