"""Exception hierarchy shared by every flowcat module."""


class FlowError(Exception):
    """Base class for all library errors."""


class UnsupportedDimension(FlowError):
    pass


class DuplicateState(FlowError):
    pass


class UnknownState(FlowError):
    pass


class UnknownWord(FlowError):
    pass


class BadBoundary(FlowError):
    pass


class CyclicFlow(FlowError):
    """The letter graph has a directed cycle, so some path space is infinite."""


class EmptyList(FlowError):
    pass


class SizeLimitExceeded(FlowError):
    pass


class NotParallel(FlowError):
    pass


class InvalidMorphism(FlowError):
    pass


class DanglingFace(FlowError):
    pass


class TooManyProcesses(FlowError):
    pass


class UndeclaredSemaphore(FlowError):
    pass


class UnmatchedV(FlowError):
    pass


class PvSyntaxError(FlowError):
    def __init__(self, message, line, column):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column
