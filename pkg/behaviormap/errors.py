# src/behaviormap/errors.py

"""Exception hierarchy shared by the library and the CLI.

Every error carries the process exit code the CLI reports for it.
"""


class BehaviorMapError(Exception):
    exit_code = 2


class InvalidParamsError(BehaviorMapError, ValueError):
    exit_code = 1


class InvalidTraitsError(BehaviorMapError, ValueError):
    exit_code = 1


class UnavailableActionError(BehaviorMapError, KeyError):
    exit_code = 1

    def __str__(self):
        # KeyError would repr() the message
        return str(self.args[0]) if self.args else ""


class CapExceededError(BehaviorMapError):
    exit_code = 1


class PathOutOfBoundsError(BehaviorMapError, ValueError):
    exit_code = 1


class MalformedMapError(BehaviorMapError, ValueError):
    exit_code = 1


class NonFiniteValueError(BehaviorMapError, ArithmeticError):
    exit_code = 2


class WanderOnEdgeError(BehaviorMapError):
    """A map edge contains the reserved "wander" label."""

    exit_code = 2

    def __init__(self, message, cells=()):
        super().__init__(message)
        self.cells = list(cells)


class MapComputationError(BehaviorMapError):
    """One or more grid cells failed; ``failures`` holds (gamma, p, reason)."""

    exit_code = 2

    def __init__(self, message, failures=()):
        super().__init__(message)
        self.failures = list(failures)


class NoPathFoundError(BehaviorMapError):
    exit_code = 2


class NotEquivalentError(BehaviorMapError):
    exit_code = 3
