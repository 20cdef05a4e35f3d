"""
Components of the structure maps as weighted sums of graph operators.

Every component is the sum over classes of top-degree graphs on one stratum
of weight times graph operator:

    lambda_l   on C(l)             free inputs
    nu_q       on CF_C(0, q)       collinear inputs
    mu_n       on CF_H(0, 0, n)    boundary (function) inputs
    V_{p,q}    on CF_C(p, q)       free, then collinear inputs
    U_{k,n}    on CF_H(k, 0, n)    free, then boundary inputs
    Z_{k,m,n}  on CF_H(k, m, n)    free, collinear, then boundary inputs
"""
import logging
from fractions import Fraction

from apps.graphs.structures import Flavor, VertexSet, enumerate_graphs
from apps.polyvector.representation import MultiOperator, apply_graph, slot_types

logger = logging.getLogger(__name__)


def bounded_out_degree(group, bound):
    """Vertices of ``group`` have at most ``bound`` outgoing edges."""

    def predicate(g):
        return all(g.out_degree(label) <= bound for label in getattr(g.vertices, group))

    predicate.__name__ = f"out_degree_{group}_at_most_{bound}"
    return predicate


def zero_operator(space, vertices, name):
    def evaluate(inputs):
        return space.zero()

    return MultiOperator(space, slot_types(vertices), evaluate, -max(vertices.dimension, 0), name, vertices.labels)


class StructureComponents:
    """
    Lazily assembled components on one polyvector space.

    ``predicate`` restricts the graphs of every component, e.g. to those whose
    free vertices emit no more edges than the inputs there can absorb.
    """

    def __init__(self, space, weight_source, predicate=None):
        self.space = space
        self.weight_source = weight_source
        self.predicate = predicate
        self._cache = {}
        self._terms = {}

    def terms(self, vertices):
        """Pairs (graph, weight) with a nonzero weight on the stratum."""
        if vertices not in self._terms:
            found = []
            if vertices.is_defined() and vertices.dimension >= 0:
                for g in enumerate_graphs(vertices, vertices.dimension, self.predicate):
                    weight = self.weight_source.weight(g)
                    if weight:
                        found.append((g, weight))
            logger.debug("%s: %d weighted graphs", vertices, len(found))
            self._terms[vertices] = found
        return self._terms[vertices]

    def component(self, vertices, name):
        if vertices in self._cache:
            return self._cache[vertices]
        terms = self.terms(vertices)
        if not terms:
            operator = zero_operator(self.space, vertices, name)
        else:
            space = self.space
            scaled = [(g, Fraction(weight)) for g, weight in terms]

            def evaluate(inputs):
                total = space.zero()
                for g, weight in scaled:
                    total = total + apply_graph(g, inputs).scale(weight)
                return total

            operator = MultiOperator(
                space, slot_types(vertices), evaluate, -vertices.dimension, name, vertices.labels
            )
        self._cache[vertices] = operator
        return operator

    def find(self, vertices, name):
        """The component, or None when no graph on the stratum has a nonzero weight."""
        if not self.terms(vertices):
            return None
        return self.component(vertices, name)

    def lam(self, arity):
        return self.component(VertexSet.standard(Flavor.C, arity), f"lambda_{arity}")

    def nu(self, arity):
        return self.component(VertexSet.standard(Flavor.CF_C, 0, arity), f"nu_{arity}")

    def mu(self, arity):
        return self.component(VertexSet.standard(Flavor.CF_H, 0, 0, arity), f"mu_{arity}")

    def V(self, p, q):
        return self.component(VertexSet.standard(Flavor.CF_C, p, q), f"V_{p},{q}")

    def U(self, k, n):
        return self.component(VertexSet.standard(Flavor.CF_H, k, 0, n), f"U_{k},{n}")

    def Z(self, k, m, n):
        return self.component(VertexSet.standard(Flavor.CF_H, k, m, n), f"Z_{k},{m},{n}")

    def weights(self, vertices):
        """Report rows of the weighted graphs of one component."""
        return [{"graph": str(g), "weight": weight} for g, weight in self.terms(vertices)]
