"""
Exception hierarchy shared by every workbench app.

Management commands map WorkbenchError to exit status 2 (bad input) and
report failed checks with exit status 1.
"""


class WorkbenchError(Exception):
    """Base class for all workbench errors."""


class GraphValidationError(WorkbenchError, ValueError):
    """Malformed vertex set or edge list."""


class EnumerationLimitExceeded(WorkbenchError):
    """A candidate space is larger than the configured bound."""

    def __init__(self, candidates, limit):
        self.candidates = candidates
        self.limit = limit
        super().__init__(
            f"{candidates} candidates exceed the enumeration limit of {limit}"
        )


class ContractionError(WorkbenchError):
    """Contracting a subgraph produced a tadpole or a repeated edge."""


class SliceError(WorkbenchError):
    """No gauge slice is available for the requested stratum."""


class DegreeMismatchError(WorkbenchError):
    """The form is not of top degree on the stratum."""


class SingularConfigurationError(WorkbenchError, ArithmeticError):
    """Coincident points, or too many singular samples in a row."""


class MissingWeightError(WorkbenchError, LookupError):
    """A weight source cannot supply the weight of a graph."""

    def __init__(self, graph, reason="no known value and numerical integration disabled"):
        self.graph = graph
        super().__init__(f"weight of {graph} unavailable: {reason}")


class SlotTypeError(WorkbenchError, TypeError):
    """An input carrying odd generators was passed to a function-valued slot."""


class NotMaurerCartanError(WorkbenchError):
    """The element does not satisfy the Maurer-Cartan equation."""


class LieAlgebraError(WorkbenchError, ValueError):
    """Structure constants are not antisymmetric or violate Jacobi."""


class RewriteBudgetExceeded(WorkbenchError):
    """Normalization did not terminate within the step budget."""

    def __init__(self, budget):
        self.budget = budget
        super().__init__(f"rewrite step budget of {budget} exhausted")


class PresentationError(WorkbenchError, ValueError):
    """Malformed operad presentation."""


class AlgebraError(WorkbenchError, ValueError):
    """Malformed polyvector, cochain or operator data."""
