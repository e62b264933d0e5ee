"""Exception types shared across the package."""


class InputError(ValueError):
    """Invalid or inconsistent input data."""


class InfeasibleResponseError(InputError):
    """A storage response violates its capacity or demand bounds."""

    def __init__(self, entity: str, outcome: int, detail: str):
        super().__init__(
            f"infeasible response for entity {entity!r} at outcome {outcome}: {detail}"
        )
        self.entity = entity
        self.outcome = outcome


class OrderingViolationError(RuntimeError):
    """Scheme cost ordering broken beyond tolerance.

    The type-based, individual-based and planner costs must be ordered;
    a violation indicates an implementation bug, not a data problem.
    """


class ConvergenceError(RuntimeError):
    """Iterative solver failed to converge; carries the best incumbent."""

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best
