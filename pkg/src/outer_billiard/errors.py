"""Exception hierarchy.

Every error carries one of three categories used by the command line
front end to pick an exit code: ``spec`` (bad or non-convex curve),
``dynamics`` (the billiard map cannot be applied) and ``numerical``
(a solver or fit did not converge).
"""


class BilliardError(Exception):
    category = "numerical"


class BadSpec(BilliardError, ValueError):
    category = "spec"


class NonConvex(BadSpec):
    category = "spec"


class BadParams(BilliardError, ValueError):
    category = "spec"


class ParallelTangents(BilliardError):
    category = "dynamics"


class DegeneratePair(BilliardError):
    category = "dynamics"


class InsidePoint(BilliardError):
    category = "dynamics"


class RootBracketFailure(BilliardError):
    category = "dynamics"


class ConsistencyError(BilliardError):
    """Geometric and variational constructions of the map disagree."""

    category = "dynamics"


class NoConvergence(BilliardError):
    category = "numerical"


class MonotonicityLoss(NoConvergence):
    category = "numerical"


class IllConditionedFit(BilliardError):
    category = "numerical"


class StepError(BilliardError):
    """A step of an orbit failed; wraps the original error with its index."""

    def __init__(self, index, error):
        super().__init__(f"step {index}: {type(error).__name__}: {error}")
        self.index = index
        self.error = error
        self.category = getattr(error, "category", "dynamics")
