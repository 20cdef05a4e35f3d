"""
Vertex sets, directed graphs and formal sums of graphs.

Three flavors of graphs are supported:

* ``C``     graphs on a finite set of free points in the plane,
* ``CF_C``  graphs on free points plus points on a line (collinear),
* ``CF_H``  graphs on free points, collinear points and points on the
  boundary of the upper half-plane.

Labels are ints or strings. Within a graph the global vertex order is
free < collinear < boundary, each group in its stored order.
"""
import enum
import itertools
import logging
import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple

import networkx as nx
from django.conf import settings

from apps.core.exceptions import EnumerationLimitExceeded, GraphValidationError

logger = logging.getLogger(__name__)

Label = int | str
Edge = tuple[Label, Label]

GROUPS = ("free", "collinear", "boundary")


class Flavor(enum.StrEnum):
    C = "C"
    CF_C = "CF_C"
    CF_H = "CF_H"


def label_key(label):
    """Total order on mixed int/str labels."""
    if isinstance(label, bool):
        raise GraphValidationError(f"invalid label {label!r}")
    if isinstance(label, int):
        return (0, label, "")
    return (1, 0, str(label))


def permutation_sign(permutation):
    """Sign of a permutation given as a sequence of distinct sortable items."""
    items = list(permutation)
    inversions = sum(
        1
        for i in range(len(items))
        for j in range(i + 1, len(items))
        if items[i] > items[j]
    )
    return -1 if inversions % 2 else 1


@dataclass(frozen=True)
class VertexSet:
    """
    Colored vertex set of a graph.

    ``free`` is an unordered set conceptually but stored in a fixed order;
    ``collinear`` and ``boundary`` are ordered along their lines.
    """

    flavor: Flavor
    free: tuple = ()
    collinear: tuple = ()
    boundary: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "flavor", Flavor(self.flavor))
        for group in GROUPS:
            object.__setattr__(self, group, tuple(getattr(self, group)))
        labels = self.labels
        for label in labels:
            label_key(label)
        if len(set(labels)) != len(labels):
            raise GraphValidationError(f"labels are not pairwise distinct: {labels}")
        if self.flavor == Flavor.C and (self.collinear or self.boundary):
            raise GraphValidationError("flavor C has neither collinear nor boundary vertices")
        if self.flavor == Flavor.CF_C:
            if self.boundary:
                raise GraphValidationError("flavor CF_C has no boundary vertices")
            if not self.collinear:
                raise GraphValidationError("flavor CF_C needs at least one collinear vertex")

    @classmethod
    def standard(cls, flavor, free=0, collinear=0, boundary=0):
        """Vertex set with labels 1..p for free points, c1.. and b1.. for the lines."""
        return cls(
            flavor,
            tuple(range(1, free + 1)),
            tuple(f"c{i}" for i in range(1, collinear + 1)),
            tuple(f"b{i}" for i in range(1, boundary + 1)),
        )

    @property
    def labels(self):
        return self.free + self.collinear + self.boundary

    @cached_property
    def index(self):
        return {label: position for position, label in enumerate(self.labels)}

    @property
    def shape(self):
        if self.flavor == Flavor.C:
            return (len(self.free),)
        if self.flavor == Flavor.CF_C:
            return (len(self.free), len(self.collinear))
        return (len(self.free), len(self.collinear), len(self.boundary))

    def __len__(self):
        return len(self.labels)

    def __contains__(self, label):
        return label in self.index

    def group_of(self, label):
        if label in self.free:
            return "free"
        if label in self.collinear:
            return "collinear"
        if label in self.boundary:
            return "boundary"
        raise GraphValidationError(f"unknown label {label!r}")

    def is_defined(self):
        """Cardinality conditions under which the configuration space exists."""
        if self.flavor == Flavor.C:
            return len(self.free) >= 2
        k, m = len(self.free), len(self.collinear)
        if self.flavor == Flavor.CF_C:
            return m >= 1 and k + m >= 2
        n = len(self.boundary)
        if m >= 1:
            return 2 * k + m + n >= 1
        return 2 * k + n >= 2

    @property
    def dimension(self):
        """Real dimension of the open stratum modulo the symmetry group."""
        k, m, n = len(self.free), len(self.collinear), len(self.boundary)
        if self.flavor == Flavor.C:
            return 2 * k - 3
        if self.flavor == Flavor.CF_C:
            return 2 * k + m - 2
        if m >= 1:
            return 2 * k + m + n - 1
        return 2 * k + n - 2

    def with_free_sorted(self):
        return VertexSet(
            self.flavor,
            tuple(sorted(self.free, key=label_key)),
            self.collinear,
            self.boundary,
        )

    def describe(self):
        return {
            "flavor": str(self.flavor),
            "free": list(self.free),
            "collinear": list(self.collinear),
            "boundary": list(self.boundary),
        }

    def __str__(self):
        groups = [",".join(map(str, getattr(self, group))) for group in GROUPS]
        return f"{self.flavor}[{'|'.join(groups)}]"


@dataclass(frozen=True)
class DirectedGraph:
    """Ordered list of directed edges on a colored vertex set."""

    vertices: VertexSet
    edges: tuple = field(default=())

    def __post_init__(self):
        edges = tuple((edge[0], edge[1]) for edge in self.edges)
        object.__setattr__(self, "edges", edges)
        for source, target in edges:
            if source not in self.vertices or target not in self.vertices:
                raise GraphValidationError(f"edge ({source}, {target}) leaves the vertex set")
            if source == target:
                raise GraphValidationError(f"tadpole at vertex {source}")
        if len(set(edges)) != len(edges):
            raise GraphValidationError("repeated edge")

    @property
    def flavor(self):
        return self.vertices.flavor

    @property
    def edge_count(self):
        return len(self.edges)

    @property
    def index_edges(self):
        index = self.vertices.index
        return tuple((index[s], index[t]) for s, t in self.edges)

    def with_edges(self, edges):
        return DirectedGraph(self.vertices, tuple(edges))

    def out_degree(self, label):
        return sum(1 for source, _ in self.edges if source == label)

    def in_degree(self, label):
        return sum(1 for _, target in self.edges if target == label)

    def describe(self):
        data = self.vertices.describe()
        data["edges"] = [list(edge) for edge in self.edges]
        return data

    def __str__(self):
        edges = ",".join(f"{s}>{t}" for s, t in self.edges)
        return f"{self.vertices}{{{edges}}}"


class ComponentSplit(NamedTuple):
    components: list
    isolated: tuple


class Canonical(NamedTuple):
    graph: DirectedGraph
    sign: int


def connected_components(g):
    """
    Split the edges of ``g`` into maximal connected edge sets.

    Each component is a tuple of edges in the graph's stored order; vertices
    incident to no edge are returned separately.
    """
    skeleton = nx.Graph()
    skeleton.add_nodes_from(g.vertices.labels)
    skeleton.add_edges_from(g.edges)
    components = []
    isolated = []
    for nodes in sorted(
        nx.connected_components(skeleton),
        key=lambda group: min(g.vertices.index[label] for label in group),
    ):
        edges = tuple(edge for edge in g.edges if edge[0] in nodes)
        if edges:
            components.append(edges)
        else:
            isolated.extend(nodes)
    return ComponentSplit(components, tuple(isolated))


def is_admissible(g):
    vertices = g.vertices
    if g.flavor == Flavor.C:
        if len(vertices) == 1:
            return not g.edges
        split = connected_components(g)
        return len(split.components) == 1 and not split.isolated
    if g.flavor == Flavor.CF_H and any(
        vertices.group_of(source) == "boundary" for source, _ in g.edges
    ):
        return False
    free = set(vertices.free)
    for component in connected_components(g).components:
        if all(s in free and t in free for s, t in component):
            return False
    return True


def canonical_form(g):
    """Sort edges by global vertex order; the sign is the parity of the sort."""
    index_edges = g.index_edges
    order = sorted(range(len(index_edges)), key=lambda i: index_edges[i])
    sign = permutation_sign(order)
    return Canonical(g.with_edges(g.edges[i] for i in order), sign)


def candidate_edges(vertices):
    """All edges an admissible graph on ``vertices`` may use, in canonical order."""
    labels = vertices.labels
    candidates = []
    for source, target in itertools.permutations(labels, 2):
        if vertices.flavor == Flavor.CF_H and vertices.group_of(source) == "boundary":
            continue
        candidates.append((source, target))
    candidates.sort(key=lambda edge: (vertices.index[edge[0]], vertices.index[edge[1]]))
    return candidates


def enumerate_graphs(vertices, edge_count, filter=None, limit=None):
    """
    One canonical representative per class of admissible graphs with the
    given number of edges.
    """
    if edge_count < 0:
        raise GraphValidationError("edge_count must be non-negative")
    limit = settings.WORKBENCH_ENUMERATION_LIMIT if limit is None else limit
    candidates = candidate_edges(vertices)
    total = math.comb(len(candidates), edge_count)
    if total > limit:
        raise EnumerationLimitExceeded(total, limit)
    logger.debug("Enumerating %d edge sets on %s", total, vertices)
    graphs = []
    for edges in itertools.combinations(candidates, edge_count):
        graph = DirectedGraph(vertices, edges)
        if not is_admissible(graph):
            continue
        if filter is not None and not filter(graph):
            continue
        graphs.append(graph)
    logger.info("Enumerated %d graphs on %s with %d edges", len(graphs), vertices, edge_count)
    return graphs


# Enumeration filters


def no_collinear_edges(g):
    """
    No edge between two collinear vertices. Opposite double edges survive;
    the eight (1, 3) classes with three edges also need ``simple``.
    """
    groups = g.vertices.group_of
    return not any(
        groups(s) == "collinear" and groups(t) == "collinear" for s, t in g.edges
    )


def simple(g):
    """No pair of opposite edges between the same two vertices."""
    edges = set(g.edges)
    return not any((t, s) in edges for s, t in g.edges)


def out_degree(group, degree):
    def predicate(g):
        return all(
            g.out_degree(label) == degree for label in getattr(g.vertices, group)
        )

    predicate.__name__ = f"out_degree_{group}_{degree}"
    return predicate


def all_of(*predicates: Callable[[DirectedGraph], bool]):
    def predicate(g):
        return all(check(g) for check in predicates)

    return predicate


FILTERS = {
    "no-collinear-edges": no_collinear_edges,
    "simple": simple,
    "free-out-degree-2": out_degree("free", 2),
}


def normalize(g):
    """Canonical representative with the free group sorted by label."""
    vertices = g.vertices.with_free_sorted()
    return canonical_form(DirectedGraph(vertices, g.edges))


def graph_sort_key(g):
    return (
        str(g.flavor),
        tuple(label_key(label) for label in g.vertices.free),
        tuple(label_key(label) for label in g.vertices.collinear),
        tuple(label_key(label) for label in g.vertices.boundary),
        g.index_edges,
    )


class GraphSum:
    """
    Formal linear combination of graphs with rational coefficients.

    Keys are normalized graphs; adding a graph whose edges are an odd
    permutation of the key's edges negates the coefficient.
    """

    def __init__(self, terms: Iterable | None = None):
        self._terms = {}
        for graph, coefficient in terms or ():
            self.add(graph, coefficient)

    @classmethod
    def of(cls, graph, coefficient=1):
        return cls([(graph, coefficient)])

    def add(self, graph, coefficient=1):
        key, sign = normalize(graph)
        value = self._terms.get(key, Fraction(0)) + sign * Fraction(coefficient)
        if value:
            self._terms[key] = value
        else:
            self._terms.pop(key, None)
        return self

    def coefficient(self, graph):
        key, sign = normalize(graph)
        return sign * self._terms.get(key, Fraction(0))

    def items(self):
        return sorted(self._terms.items(), key=lambda item: graph_sort_key(item[0]))

    def graphs(self):
        return [graph for graph, _ in self.items()]

    def copy(self):
        result = GraphSum()
        result._terms = dict(self._terms)
        return result

    def __iter__(self):
        return iter(self.items())

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __add__(self, other):
        result = self.copy()
        for graph, coefficient in other.items():
            result.add(graph, coefficient)
        return result

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        scalar = Fraction(scalar)
        return GraphSum((graph, scalar * c) for graph, c in self.items())

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, GraphSum):
            return NotImplemented
        return self._terms == other._terms

    __hash__ = None

    def __repr__(self):
        body = " + ".join(f"({c})*{g}" for g, c in self.items()) or "0"
        return f"GraphSum({body})"
