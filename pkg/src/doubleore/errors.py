"""Exception hierarchy shared by every module."""


class DoubleOreError(Exception):
    """Base class; the CLI maps these to exit code 2 when raised on input."""


class DivisionByUncertifiedNonzero(DoubleOreError, ZeroDivisionError):
    pass


class NotInvertible(DivisionByUncertifiedNonzero):
    """The divisor is a zero divisor modulo a (reducible) constraint."""


class BindingViolatesConstraint(DoubleOreError, ValueError):
    pass


class UnboundParameter(DoubleOreError, KeyError):
    pass


class UnknownParameter(DoubleOreError, KeyError):
    pass


class ConstraintParseError(DoubleOreError, ValueError):
    pass


class EnvironmentMismatch(DoubleOreError, ValueError):
    pass


class AlphabetMismatch(DoubleOreError, ValueError):
    pass


class NotOrientable(DoubleOreError, ValueError):
    pass


class MissingRule(DoubleOreError, ValueError):
    pass


class NonTermination(DoubleOreError, RuntimeError):
    pass


class NotTrimmed(DoubleOreError, ValueError):
    pass


class BaseNotSupported(DoubleOreError, ValueError):
    pass


class RelationDegreeTooHigh(DoubleOreError, ValueError):
    pass


class NotNormalForm(DoubleOreError, ValueError):
    pass


class InconsistentSwap(DoubleOreError, ValueError):
    pass


class WitnessFormsMissing(DoubleOreError, ValueError):
    pass


class UnsupportedCalculusShape(DoubleOreError, ValueError):
    pass


class UnknownFamily(DoubleOreError, KeyError):
    pass


class OverrideViolatesConstraint(DoubleOreError, ValueError):
    pass


class UnknownGenerator(DoubleOreError, KeyError):
    pass


class PresentationSyntaxError(DoubleOreError, SyntaxError):
    def __init__(self, message: str, line: int = 0, column: int = 0, expected: str = ""):
        self.line = line
        self.column = column
        self.expected = expected
        text = f"line {line}, column {column}: {message}"
        if expected:
            text += f" (expected {expected})"
        super().__init__(text)
