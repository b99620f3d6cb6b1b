"""Exception classes.

Every failure mode of the library maps onto one of these classes so callers
(and the command-line runner) can tell the stages apart.
"""


class WolffError(Exception):
    """Base class for all library errors."""

    #: short machine-readable tag, overridden per subclass or instance
    code = "error"

    def __init__(self, message, code=None, **details):
        super().__init__(message)
        if code is not None:
            self.code = code
        self.details = details


class InvalidArgument(WolffError, ValueError):
    code = "invalid-argument"


class ParameterError(InvalidArgument):
    """A (n, p, alpha, q1, q2, mode) combination violating a hypothesis.

    ``reason`` is one of ``"q-range"``, ``"alpha-range"``, ``"p-range"``,
    ``"n-range"``, ``"mode"`` or ``"p>=n nonexistence"``.
    """

    code = "validation"

    def __init__(self, message, reason):
        super().__init__(message, reason=reason)
        self.reason = reason


class AccuracyFailure(WolffError, ArithmeticError):
    """A quadrature did not reach its tolerance."""

    code = "accuracy-failure"

    def __init__(self, message, error_estimate=float("nan"), **details):
        super().__init__(message, **details)
        self.error_estimate = error_estimate


class NumericFailure(WolffError, ArithmeticError):
    """Monotone iteration produced a decrease beyond the noise floor."""

    code = "numeric-failure"

    def __init__(self, message, step=None, node=None, **details):
        super().__init__(message, **details)
        self.step = step
        self.node = node


class SupersolutionFailure(NumericFailure):
    code = "supersolution-failure"


class DegenerateMeasure(NumericFailure):
    code = "degenerate-measure"


class SandwichFailure(NumericFailure):
    code = "sandwich-failure"

    def __init__(self, message, end=None, **details):
        super().__init__(message, **details)
        self.end = end


class ConditionFailure(WolffError):
    """A hypothesis on the measure failed, so the system is not solved."""

    code = "condition-failure"

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
