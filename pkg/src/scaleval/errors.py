"""Exception hierarchy shared across the package."""


class ScaleValidationError(Exception):
    """Base class for every error raised by scaleval."""


# numerics
class NotPositiveDefinite(ScaleValidationError, ValueError):
    pass


class NonFiniteObjective(ScaleValidationError, ArithmeticError):
    pass


class InvalidParameter(ScaleValidationError, ValueError):
    pass


# data model
class MissingColumn(ScaleValidationError, KeyError):
    def __init__(self, column):
        super().__init__(column)
        self.column = column

    def __str__(self):
        return f"missing column {self.column!r}"


class EmptyDataset(ScaleValidationError, ValueError):
    pass


class MalformedCsv(ScaleValidationError, ValueError):
    def __init__(self, line, reason=""):
        super().__init__(f"malformed CSV at line {line}" + (f": {reason}" if reason else ""))
        self.line = line


class ZeroVariance(ScaleValidationError, ValueError):
    def __init__(self, item_id):
        super().__init__(f"column {item_id!r} has zero variance")
        self.item_id = item_id


class SpecInvalid(ScaleValidationError, ValueError):
    pass


# content validity
class TooFewExperts(ScaleValidationError, ValueError):
    pass


class EaOutOfRange(ScaleValidationError, ValueError):
    pass


class DegenerateChance(ScaleValidationError, ZeroDivisionError):
    pass


# sampling adequacy
class DegenerateZeroCorrelation(ScaleValidationError, ZeroDivisionError):
    pass


class SampleTooSmall(ScaleValidationError, ValueError):
    pass


# cfa
class UnderidentifiedModel(ScaleValidationError, ValueError):
    pass


# reliability / validity
class TooFewItems(ScaleValidationError, ValueError):
    pass


class UnknownFactor(ScaleValidationError, KeyError):
    pass


class UnfittedSolution(ScaleValidationError, ValueError):
    pass


class LengthMismatch(ScaleValidationError, ValueError):
    pass


class DegenerateVariance(ScaleValidationError, ValueError):
    pass


class DimensionMismatch(ScaleValidationError, ValueError):
    pass


class NonPositiveMonotrait(ScaleValidationError, ValueError):
    pass


class MissingCriterion(ScaleValidationError, KeyError):
    pass


class RankDeficient(ScaleValidationError, ValueError):
    pass


# pipeline
class ConfigInvalid(ScaleValidationError, ValueError):
    pass


class InputUnreadable(ScaleValidationError, OSError):
    pass
