"""
Embeddings of full subgraphs, quotients, cocomposition and its dual
operadic composition for the three graph flavors.

A codimension-one splitting of a vertex set selects the vertices that
collide (the inner vertex set) and the vertex set obtained by replacing
them with a single new vertex (the outer vertex set). The admissible
shapes are

* ``C``    inner C(S) inside C(ℓ), 2 <= |S| < ℓ,
* ``I``    inner C(I) at a free vertex of CF_C or CF_H,
* ``ST``   inner CF_C(S, T) at a collinear vertex of CF_C, T an interval,
* ``PQ``   inner CF_C(P, Q) at a collinear vertex of CF_H, Q an interval,
* ``STU``  inner CF_H(S, T, U) at a boundary vertex of CF_H, T empty or all
  collinear vertices, U an interval of the boundary (possibly empty, then
  sitting in one of the gaps).
"""
import itertools
import logging
from dataclasses import dataclass

from django.conf import settings

from apps.core.exceptions import (
    ContractionError,
    EnumerationLimitExceeded,
    GraphValidationError,
)

from .structures import (
    DirectedGraph,
    Flavor,
    GraphSum,
    VertexSet,
    is_admissible,
    normalize,
)

logger = logging.getLogger(__name__)

OUTPUT_GROUP = {
    Flavor.C: "free",
    Flavor.CF_C: "collinear",
    Flavor.CF_H: "boundary",
}


@dataclass(frozen=True)
class Splitting:
    kind: str
    inner: VertexSet
    outer: VertexSet
    label: object
    group: str
    # same-colored outer vertices in front of the contracted one
    before: int

    @property
    def collapsed(self):
        return set(self.inner.labels)

    def describe(self):
        return {
            "kind": self.kind,
            "inner": self.inner.describe(),
            "outer": self.outer.describe(),
            "vertex": self.label,
        }


@dataclass(frozen=True)
class Embedding:
    host: DirectedGraph
    sub: DirectedGraph
    edge_injection: tuple
    splitting: Splitting


@dataclass(frozen=True)
class QuotientResult:
    quotient: DirectedGraph
    sign: int


@dataclass(frozen=True)
class CocompositionTerm:
    left: GraphSum
    right: DirectedGraph
    splitting: Splitting


def fresh_label(vertices, preferred="v"):
    if preferred not in vertices:
        return preferred
    for counter in itertools.count(1):
        candidate = f"{preferred}{counter}"
        if candidate not in vertices:
            return candidate


def _subsets(items, minimum=0):
    for size in range(minimum, len(items) + 1):
        yield from itertools.combinations(items, size)


def _intervals(items, allow_empty=False):
    """Nonempty intervals as (start, stop); empty ones as (gap, gap)."""
    n = len(items)
    for start in range(n):
        for stop in range(start + 1, n + 1):
            yield start, stop
    if allow_empty:
        for gap in range(n + 1):
            yield gap, gap


def _replace_subset(group, subset, label):
    """Drop ``subset`` from ``group`` and put ``label`` where its first member was."""
    chosen = set(subset)
    result = []
    placed = False
    for item in group:
        if item in chosen:
            if not placed:
                result.append(label)
                placed = True
            continue
        result.append(item)
    return tuple(result)


def _without(group, subset):
    chosen = set(subset)
    return tuple(item for item in group if item not in chosen)


def splittings(vertices, label=None):
    """All codimension-one splittings of ``vertices`` whose factors exist."""
    label = fresh_label(vertices) if label is None else label
    if label in vertices:
        raise GraphValidationError(f"contracted label {label!r} already in use")
    found = []

    def keep(splitting):
        if splitting.inner.is_defined() and splitting.outer.is_defined():
            found.append(splitting)

    free, collinear, boundary = vertices.free, vertices.collinear, vertices.boundary
    if vertices.flavor == Flavor.C:
        for subset in _subsets(free, 2):
            if len(subset) == len(free):
                continue
            keep(Splitting(
                "C",
                VertexSet(Flavor.C, subset),
                VertexSet(Flavor.C, _replace_subset(free, subset, label)),
                label, "free", 0,
            ))
        return found

    for subset in _subsets(free, 2):
        outer = VertexSet(
            vertices.flavor, _replace_subset(free, subset, label), collinear, boundary
        )
        keep(Splitting("I", VertexSet(Flavor.C, subset), outer, label, "free", 0))

    if vertices.flavor == Flavor.CF_C:
        for subset in _subsets(free):
            for start, stop in _intervals(collinear):
                block = collinear[start:stop]
                keep(Splitting(
                    "ST",
                    VertexSet(Flavor.CF_C, subset, block),
                    VertexSet(
                        Flavor.CF_C,
                        _without(free, subset),
                        collinear[:start] + (label,) + collinear[stop:],
                    ),
                    label, "collinear", start,
                ))
        return found

    for subset in _subsets(free):
        for start, stop in _intervals(collinear):
            block = collinear[start:stop]
            keep(Splitting(
                "PQ",
                VertexSet(Flavor.CF_C, subset, block),
                VertexSet(
                    Flavor.CF_H,
                    _without(free, subset),
                    collinear[:start] + (label,) + collinear[stop:],
                    boundary,
                ),
                label, "collinear", start,
            ))
    line_choices = [()] if not collinear else [(), collinear]
    for subset in _subsets(free):
        for line in line_choices:
            for start, stop in _intervals(boundary, allow_empty=True):
                block = boundary[start:stop]
                keep(Splitting(
                    "STU",
                    VertexSet(Flavor.CF_H, subset, line, block),
                    VertexSet(
                        Flavor.CF_H,
                        _without(free, subset),
                        _without(collinear, line),
                        boundary[:start] + (label,) + boundary[stop:],
                    ),
                    label, "boundary", start,
                ))
    return found


def induced_subgraph(host, inner):
    labels = set(inner.labels)
    return DirectedGraph(
        inner, tuple(edge for edge in host.edges if edge[0] in labels and edge[1] in labels)
    )


def _same_vertices(a, b):
    return (
        a.flavor == b.flavor
        and set(a.free) == set(b.free)
        and a.collinear == b.collinear
        and a.boundary == b.boundary
    )


def find_embeddings(host, sub, label=None):
    """
    All embeddings of ``sub`` as a full subgraph of ``host`` whose vertex
    data matches one of the splitting shapes.
    """
    labels = set(sub.vertices.labels)
    if not labels <= set(host.vertices.labels):
        return []
    positions = tuple(
        i for i, edge in enumerate(host.edges) if edge[0] in labels and edge[1] in labels
    )
    if tuple(host.edges[i] for i in positions) != sub.edges:
        return []
    if _same_vertices(host.vertices, sub.vertices):
        label = fresh_label(host.vertices) if label is None else label
        group = OUTPUT_GROUP[host.flavor]
        point = VertexSet(host.flavor, **{group: (label,)})
        total = Splitting("total", host.vertices, point, label, group, 0)
        return [Embedding(host, sub, positions, total)]
    return [
        Embedding(host, sub, positions, splitting)
        for splitting in splittings(host.vertices, label)
        if _same_vertices(splitting.inner, sub.vertices)
    ]


def _contract(host, positions, splitting):
    collapsed = splitting.collapsed
    inside = set(positions)

    def project(vertex):
        return splitting.label if vertex in collapsed else vertex

    edges = []
    for i, (source, target) in enumerate(host.edges):
        if i in inside:
            continue
        edge = (project(source), project(target))
        if edge[0] == edge[1]:
            raise ContractionError(f"contracting {sorted(map(str, collapsed))} creates a tadpole")
        if edge in edges:
            raise ContractionError(f"contracting {sorted(map(str, collapsed))} repeats edge {edge}")
        edges.append(edge)
    # sign of moving the sub edges in front of the remaining ones
    outside = [i for i in range(host.edge_count) if i not in inside]
    crossings = sum(1 for i in positions for j in outside if i > j)
    return QuotientResult(
        DirectedGraph(splitting.outer, tuple(edges)), -1 if crossings % 2 else 1
    )


def quotient(host, e):
    """Contract the embedded subgraph to the splitting's new vertex."""
    return _contract(host, e.edge_injection, e.splitting)


def cocompose(g, label=None):
    """Terms (left factor, right factor) of the cocomposition of ``g``."""
    terms = []
    for splitting in splittings(g.vertices, label):
        sub = induced_subgraph(g, splitting.inner)
        if not is_admissible(sub):
            continue
        labels = splitting.collapsed
        positions = tuple(
            i for i, edge in enumerate(g.edges) if edge[0] in labels and edge[1] in labels
        )
        try:
            result = _contract(g, positions, splitting)
        except ContractionError as exc:
            logger.debug("Dropping term of %s: %s", g, exc)
            continue
        if not is_admissible(result.quotient):
            continue
        right, right_sign = normalize(sub)
        terms.append(CocompositionTerm(
            GraphSum.of(result.quotient, result.sign * right_sign), right, splitting
        ))
    return terms


def _is_unit(g):
    return len(g.vertices) == 1 and not g.edges


def _host_vertices(g1, at_vertex, g2):
    v1, v2 = g1.vertices, g2.vertices
    group = v1.group_of(at_vertex)
    if group != OUTPUT_GROUP[v2.flavor]:
        raise GraphValidationError(
            f"cannot insert a {v2.flavor} graph at {group} vertex {at_vertex!r}"
        )
    others = set(v1.labels) - {at_vertex}
    if others & set(v2.labels):
        raise GraphValidationError("inserted graph shares labels with the host")

    def splice(items, block):
        position = items.index(at_vertex)
        return items[:position] + tuple(block) + items[position + 1:]

    if group == "free":
        return VertexSet(v1.flavor, splice(v1.free, v2.free), v1.collinear, v1.boundary)
    if group == "collinear":
        return VertexSet(
            v1.flavor, v1.free + v2.free, splice(v1.collinear, v2.collinear), v1.boundary
        )
    if v1.collinear and v2.collinear:
        return None
    return VertexSet(
        v1.flavor,
        v1.free + v2.free,
        v1.collinear + v2.collinear,
        splice(v1.boundary, v2.boundary),
    )


def operad_compose(g1, at_vertex, g2, limit=None):
    """
    Insert ``g2`` at vertex ``at_vertex`` of ``g1``.

    Hosts carry the edges of ``g2`` first, then those of ``g1`` with every
    endpoint at ``at_vertex`` reattached to some vertex of ``g2``; only
    admissible hosts are kept.
    """
    if _is_unit(g2) and _output_matches(g1, at_vertex, g2):
        (label,) = g2.vertices.labels
        return GraphSum.of(_relabel(g1, at_vertex, label))
    if _is_unit(g1) and g1.vertices.labels == (at_vertex,):
        return GraphSum.of(g2)
    result = GraphSum()
    if not (g1.vertices.is_defined() and g2.vertices.is_defined()):
        logger.debug("No composition: %s or %s is not a stratum", g1, g2)
        return result
    vertices = _host_vertices(g1, at_vertex, g2)
    if vertices is None:
        return result
    slots = [
        (i, end) for i, edge in enumerate(g1.edges) for end in (0, 1) if edge[end] == at_vertex
    ]
    limit = settings.WORKBENCH_ENUMERATION_LIMIT if limit is None else limit
    candidates = len(g2.vertices) ** len(slots)
    if candidates > limit:
        raise EnumerationLimitExceeded(candidates, limit)
    for choice in itertools.product(g2.vertices.labels, repeat=len(slots)):
        edges = [list(edge) for edge in g1.edges]
        for (i, end), label in zip(slots, choice, strict=True):
            edges[i][end] = label
        host = DirectedGraph(vertices, g2.edges + tuple(tuple(edge) for edge in edges))
        if is_admissible(host):
            result.add(host)
    return result


def _output_matches(g1, at_vertex, g2):
    return g1.vertices.group_of(at_vertex) == OUTPUT_GROUP[g2.vertices.flavor]


def _relabel(g, old, new):
    if old == new:
        return g

    def swap(label):
        return new if label == old else label

    v = g.vertices
    vertices = VertexSet(
        v.flavor,
        tuple(map(swap, v.free)),
        tuple(map(swap, v.collinear)),
        tuple(map(swap, v.boundary)),
    )
    return DirectedGraph(vertices, tuple((swap(s), swap(t)) for s, t in g.edges))


def compose_sums(left, at_vertex, right):
    """Bilinear extension of operad_compose to GraphSums."""
    total = GraphSum()
    for g1, c1 in left.items():
        for g2, c2 in right.items():
            total = total + operad_compose(g1, at_vertex, g2) * (c1 * c2)
    return total
