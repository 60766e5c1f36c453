"""Exception hierarchy. Every error raised by the package derives from
:class:`StolarskyError`."""


class StolarskyError(Exception):
    pass


class DomainError(StolarskyError, ValueError):
    """An argument or intermediate value is outside a function's domain."""


class EvaluationOverflow(StolarskyError, OverflowError):
    pass


class OutOfRange(StolarskyError, ValueError):
    """A target value lies outside the open interval of attainable means."""


class NotBracketed(StolarskyError):
    """No sign change was found in a search window."""


class NoRootFound(StolarskyError):
    pass


class DegenerateFunction(StolarskyError):
    """f' equals the secant slope on (almost) the whole interval."""


class DegenerateDenominator(StolarskyError, ZeroDivisionError):
    pass


class BranchError(StolarskyError, ValueError):
    """The operation is not defined for this branch of alpha."""


class PrecisionFloor(StolarskyError):
    """Round-off swamped an asymptotic tabulation before convergence showed."""

    def __init__(self, message, best_k=None, report=None):
        super().__init__(message)
        self.best_k = best_k
        self.report = report


class ExprSyntaxError(StolarskyError, SyntaxError):
    """Expression parse failure at a 0-based character ``offset``."""

    def __init__(self, message, offset, expected=()):
        super().__init__(message)
        self.msg = message
        self.offset = offset
        self.expected = tuple(sorted(expected))

    def __str__(self):
        if self.expected:
            return f"{self.msg} at offset {self.offset} (expected one of: {', '.join(self.expected)})"
        return f"{self.msg} at offset {self.offset}"
