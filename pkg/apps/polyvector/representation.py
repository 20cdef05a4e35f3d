"""
Graphs acting as multilinear operators on polyvector fields.

Each vertex is an input slot, in the vertex order of the graph. Each edge
(s, t) acts by tau on the slots of s and t; the edges act in their stored
order and the slots are multiplied afterwards. Half-plane graphs also project
the result onto functions, and their boundary slots only accept functions.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction

from apps.core.exceptions import AlgebraError, SlotTypeError
from apps.graphs.structures import Flavor

from .algebra import Tensor, project_to_O

logger = logging.getLogger(__name__)

POLY = "T"
FUNCTION = "O"


@dataclass(frozen=True)
class MultiOperator:
    """
    Multilinear map on polyvectors.

    ``slots`` gives the type of each input: ``"T"`` for any polyvector, ``"O"``
    for psi-free functions. ``labels`` optionally names the inputs.
    """

    space: object
    slots: tuple
    evaluate: object
    degree: int = 0
    name: str = ""
    labels: tuple | None = field(default=None)

    @property
    def arity(self):
        return len(self.slots)

    def __call__(self, *inputs):
        if len(inputs) != self.arity:
            raise AlgebraError(f"{self.name or 'operator'} takes {self.arity} inputs, got {len(inputs)}")
        for position, (kind, value) in enumerate(zip(self.slots, inputs, strict=True)):
            if value.space != self.space:
                raise AlgebraError("input lives on another space")
            if kind == FUNCTION and not value.is_function():
                raise SlotTypeError(f"slot {position} of {self.name or 'operator'} accepts functions only")
        return self.evaluate(list(inputs))

    def call_labeled(self, inputs):
        """Evaluate with inputs given as a mapping from vertex label to polyvector."""
        if self.labels is None:
            raise AlgebraError("operator has no labeled inputs")
        return self(*(inputs[label] for label in self.labels))

    def __add__(self, other):
        if other.slots != self.slots or other.space != self.space:
            raise AlgebraError("operators of different signatures")

        def evaluate(inputs):
            return self.evaluate(inputs) + other.evaluate(inputs)

        return MultiOperator(self.space, self.slots, evaluate, self.degree, f"{self.name}+{other.name}", self.labels)

    def scale(self, scalar):
        scalar = Fraction(scalar)

        def evaluate(inputs):
            return self.evaluate(inputs).scale(scalar)

        return MultiOperator(self.space, self.slots, evaluate, self.degree, self.name, self.labels)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def bind(self, *leading):
        """Fix the first inputs; the result takes the remaining ones."""
        count = len(leading)
        if count > self.arity:
            raise AlgebraError("too many bound inputs")
        for position, (kind, value) in enumerate(zip(self.slots, leading, strict=False)):
            if kind == FUNCTION and not value.is_function():
                raise SlotTypeError(f"slot {position} accepts functions only")
        fixed = list(leading)

        def evaluate(inputs):
            return self.evaluate(fixed + list(inputs))

        labels = None if self.labels is None else self.labels[count:]
        return MultiOperator(self.space, self.slots[count:], evaluate, self.degree, self.name, labels)


def slot_types(vertices):
    if vertices.flavor == Flavor.CF_H:
        return tuple(
            FUNCTION if vertices.group_of(label) == "boundary" else POLY
            for label in vertices.labels
        )
    return (POLY,) * len(vertices)


def apply_graph(g, inputs):
    """m (or projection of m) after tau over the edges of ``g``, first edge first."""
    tensor = inputs if isinstance(inputs, Tensor) else Tensor.of(inputs)
    for s, t in g.index_edges:
        if not tensor:
            break
        tensor = tensor.tau(s, t)
    if not tensor:
        return tensor.space.zero()
    result = tensor.multiply()
    if g.flavor == Flavor.CF_H:
        result = project_to_O(result)
    return result


def phi(g, space):
    """The operator of graph ``g``; inputs follow the vertex order of ``g``."""

    def evaluate(inputs):
        return apply_graph(g, inputs)

    return MultiOperator(
        space,
        slot_types(g.vertices),
        evaluate,
        degree=-g.edge_count,
        name=str(g),
        labels=g.vertices.labels,
    )


def phi_sum(graph_sum, inputs, space):
    """Evaluate a GraphSum on inputs keyed by vertex label."""
    result = space.zero()
    for graph, coefficient in graph_sum.items():
        result = result + phi(graph, space).call_labeled(inputs).scale(coefficient)
    return result
