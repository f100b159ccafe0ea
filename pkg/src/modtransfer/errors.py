"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where an operation is defined."""


class PoleError(DomainError):
    """Evaluation at a pole (Hurwitz zeta at w = 1, Möbius pole of a slash action)."""


class BoundaryHitError(DomainError):
    """An orbit iterate landed on a branch boundary of the Farey map."""


class ConvergenceError(RuntimeError):
    """An iterative method did not reach its tolerance within the iteration budget."""


class OracleIncompleteError(RuntimeError):
    """The brute-force conjugacy oracle could not resolve some classes within its bounds.

    Attributes
    ----------
    counts : dict
        Class counts found so far, keyed by trace.
    unresolved : list of int
        Traces whose count did not stabilise under the search bounds.
    """

    def __init__(self, counts, unresolved):
        self.counts = counts
        self.unresolved = unresolved
        super().__init__(f"conjugacy counts not stable for traces {unresolved}")
