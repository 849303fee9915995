"""Exception hierarchy shared by every module in the package."""


class ResetmonError(Exception):
    """Base class for all errors raised by resetmon."""


class ConfigurationError(ResetmonError, ValueError):
    """Invalid parameters, mismatched propositions or malformed models."""


class ParseError(ResetmonError, ValueError):
    """Malformed input text.

    ``code`` is a stable diagnostic identifier (``E_ROWSUM``, ``H_NONDET``, ...);
    ``line`` and ``col`` are 1-based and may be ``None`` when the problem is not
    tied to one position (e.g. a row whose probabilities do not sum to one).
    """

    def __init__(self, code, message, line=None, col=None):
        self.code = code
        self.message = message
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f" at line {line}" + (f", column {col}" if col is not None else "")
        super().__init__(f"{code}{where}: {message}")


class ProtocolError(ResetmonError, RuntimeError):
    """A stateful object was driven in a way its contract forbids."""


class PreconditionError(ResetmonError, ValueError):
    """An operation was called on an input outside its domain."""


class GenerationError(ResetmonError, ValueError):
    """A random model could not be generated with the requested parameters."""
