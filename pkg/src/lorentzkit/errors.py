"""Error hierarchy shared by all modules (the CLI maps these to exit codes)."""


class LorentzkitError(Exception):
    """Base class."""


class InputError(LorentzkitError, ValueError):
    """Malformed or inconsistent input (exit code 2)."""


class DomainError(LorentzkitError, ValueError):
    """Input is well formed but outside the domain of the operation."""


class PreconditionError(LorentzkitError, ValueError):
    """A mathematical precondition of the operation does not hold."""


class InvariantError(LorentzkitError, RuntimeError):
    """An internal consistency check failed; indicates a bug."""
