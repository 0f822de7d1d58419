"""Exception hierarchy.

Everything raised on purpose derives from :class:`QLSpinError`, which the
CLI maps to exit code 1 (domain errors) or 2 (configuration errors).
"""


class QLSpinError(Exception):
    pass


# state / dynamics

class UnknownRegister(QLSpinError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class IndexOutOfRange(QLSpinError, IndexError):
    pass


class DuplicateLabel(QLSpinError, ValueError):
    pass


class ShapeMismatch(QLSpinError, ValueError):
    pass


class DimMismatch(ShapeMismatch):
    pass


class WrongRegisterKind(QLSpinError, TypeError):
    pass


class TruncationError(QLSpinError, ValueError):
    """Population would leak past the Fock-space cutoff."""


class InvalidState(QLSpinError, ValueError):
    pass


# trap model

class NonPositiveField(QLSpinError, ValueError):
    pass


class NonPositiveDistance(QLSpinError, ValueError):
    pass


class NonPositiveFrequency(QLSpinError, ValueError):
    pass


class OrderingViolation(QLSpinError, ValueError):
    pass


class UnstableTrap(QLSpinError, ValueError):
    pass


# protocol

class PreconditionViolated(QLSpinError, RuntimeError):
    pass


class SequenceSyntaxError(QLSpinError, SyntaxError):
    """One or more positioned errors in a sequence script.

    ``errors`` holds every diagnostic as ``(line, column, message)``; the
    ``line``/``column``/``message`` attributes mirror the first one.
    """

    def __init__(self, errors):
        self.errors = list(errors)
        line, column, message = self.errors[0]
        self.line = line
        self.column = column
        self.message = message
        super().__init__(self._render())

    def _render(self):
        return "\n".join(f"line {ln}, column {col}: {msg}" for ln, col, msg in self.errors)

    def __str__(self):
        return self._render()


class UnknownKeyword(SequenceSyntaxError):
    pass


class MalformedNumber(SequenceSyntaxError):
    pass


# experiment layer

class ConfigError(QLSpinError, ValueError):
    pass


class ConfigParseError(ConfigError):
    def __init__(self, line, message):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}")


class UnknownKey(ConfigParseError):
    pass


class MissingRequiredKey(ConfigError):
    pass


class FitDiverged(QLSpinError, RuntimeError):
    pass


class DegenerateData(QLSpinError, ValueError):
    pass
