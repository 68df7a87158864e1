"""Exception hierarchy shared by every module."""


class WalkerError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(WalkerError):
    def __init__(self, message, position):
        super().__init__(f"{message} at offset {position}")
        self.position = position


class UnknownIdentifierError(ParseError):
    def __init__(self, name, position):
        super().__init__(f"unknown identifier {name!r}", position)
        self.name = name


class DomainError(WalkerError, ValueError):
    """Numeric evaluation left the domain of a subexpression."""

    def __init__(self, message, subexpression=None):
        detail = f" in {subexpression}" if subexpression is not None else ""
        super().__init__(f"{message}{detail}")
        self.subexpression = subexpression


class SingularMetricError(WalkerError):
    pass


class RankError(WalkerError):
    def __init__(self, message, witness=None):
        super().__init__(message if witness is None else f"{message} (witness {witness})")
        self.witness = witness


class NotInvolutiveError(WalkerError):
    pass


class ConstancyError(WalkerError):
    def __init__(self, message, coordinate=None):
        super().__init__(message)
        self.coordinate = coordinate


class NotParallelError(WalkerError):
    pass


class RepresentationError(WalkerError):
    pass


class StepUnderflowError(WalkerError):
    pass


class InconsistencyError(WalkerError):
    """An identity that must hold by construction failed."""


class SpecError(WalkerError):
    """A spec document failed validation."""


class UnboundVariableError(WalkerError, ValueError):
    """An expression mentions a name that is not a chart coordinate."""

    def __init__(self, name, chart_names):
        super().__init__(f"variable {name!r} is not a coordinate of chart {tuple(chart_names)}")
        self.name = name
