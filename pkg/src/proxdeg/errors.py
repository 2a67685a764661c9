"""Exception types shared across the package."""


class ProxdegError(Exception):
    """Base class for errors raised by this package."""


class ParameterError(ProxdegError, ValueError):
    """An argument violates a function's contract."""


class DuplicatePointError(ProxdegError, ValueError):
    """A point set contains two identical points."""


class DisconnectedGraphError(ProxdegError, ValueError):
    """Stretch is undefined because some vertex pair has no path."""

    def __init__(self, u: int, v: int):
        super().__init__(
            f"graph is disconnected: vertices {u} and {v} are mutually unreachable"
        )
        self.pair = (u, v)

    def __reduce__(self):
        return (type(self), self.pair)


class TrialError(ProxdegError, RuntimeError):
    """A Monte Carlo trial failed; carries the trial index."""

    def __init__(self, trial: int, message: str):
        super().__init__(f"trial {trial}: {message}")
        self.trial = trial
        self.message = message

    def __reduce__(self):
        return (type(self), (self.trial, self.message))
