import itertools
import json
from fractions import Fraction
from io import StringIO

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings

from apps.core.exceptions import ContractionError, EnumerationLimitExceeded

from .cooperad import (
    cocompose,
    compose_sums,
    find_embeddings,
    operad_compose,
    quotient,
    splittings,
)
from .serializers import GraphSerializer, load_graph
from .structures import (
    DirectedGraph,
    Flavor,
    GraphSum,
    VertexSet,
    canonical_form,
    connected_components,
    enumerate_graphs,
    is_admissible,
    no_collinear_edges,
    normalize,
    permutation_sign,
    simple,
)


def c_graph(labels, edges):
    return DirectedGraph(VertexSet(Flavor.C, tuple(labels)), tuple(edges))


SMALL_SHAPES = {
    Flavor.C: [(n,) for n in range(2, 5)],
    Flavor.CF_C: [(p, q) for p in range(4) for q in range(1, 5) if p + q <= 4],
    Flavor.CF_H: [
        (k, m, n) for k in range(5) for m in range(5) for n in range(5) if 0 < k + m + n <= 4
    ],
}


def small_admissible_graphs(flavor, max_edges=3):
    """Every admissible graph of one flavor with at most four vertices and ``max_edges`` edges."""
    graphs = []
    for shape in SMALL_SHAPES[flavor]:
        vertices = VertexSet.standard(flavor, *shape)
        if not vertices.is_defined():
            continue
        for edges in range(max_edges + 1):
            graphs.extend(enumerate_graphs(vertices, edges))
    return graphs


def _accumulate(found, key, coefficient):
    found[key] = found.get(key, Fraction(0)) + coefficient


def collapse_inner_first(host):
    """(outer, middle, inner) coefficients from cocomposing the left factor again."""
    found = {}
    for first in cocompose(host, label="v"):
        for contracted, c1 in first.left.items():
            for second in cocompose(contracted, label="w"):
                if "v" not in second.splitting.collapsed:
                    continue
                for outer, c2 in second.left.items():
                    _accumulate(found, (outer, second.right, first.right), c1 * c2)
    return {key: value for key, value in found.items() if value}


def collapse_outer_first(host):
    """(outer, middle, inner) coefficients from cocomposing the right factor again."""
    found = {}
    for first in cocompose(host, label="w"):
        for outer, c1 in first.left.items():
            for second in cocompose(first.right, label="v"):
                for middle, c2 in second.left.items():
                    _accumulate(found, (outer, middle, second.right), c1 * c2)
    return {key: value for key, value in found.items() if value}


def brute_force_parity(permutation):
    """Parity by counting adjacent transpositions of a bubble sort."""
    items = list(permutation)
    swaps = 0
    for i in range(len(items)):
        for j in range(len(items) - 1 - i):
            if items[j] > items[j + 1]:
                items[j], items[j + 1] = items[j + 1], items[j]
                swaps += 1
    return -1 if swaps % 2 else 1


class VertexSetTest(SimpleTestCase):
    """Test cases for colored vertex sets."""

    def test_flavor_rules(self):
        """Test that the flavor constrains which groups may be populated."""
        with self.assertRaises(ValueError):
            VertexSet(Flavor.C, (1, 2), ("c1",))
        with self.assertRaises(ValueError):
            VertexSet(Flavor.CF_C, (1,), ())
        with self.assertRaises(ValueError):
            VertexSet(Flavor.CF_C, (1,), ("c1",), ("b1",))
        with self.assertRaises(ValueError):
            VertexSet(Flavor.C, (1, 1))

    def test_dimensions(self):
        """Test the stratum dimensions of each flavor."""
        self.assertEqual(VertexSet.standard(Flavor.C, 3).dimension, 3)
        self.assertEqual(VertexSet.standard(Flavor.CF_C, 1, 3).dimension, 3)
        self.assertEqual(VertexSet.standard(Flavor.CF_H, 1, 0, 2).dimension, 2)
        self.assertEqual(VertexSet.standard(Flavor.CF_H, 1, 1, 1).dimension, 3)

    def test_is_defined(self):
        """Test the cardinality conditions for existing strata."""
        self.assertFalse(VertexSet.standard(Flavor.C, 1).is_defined())
        self.assertTrue(VertexSet.standard(Flavor.CF_C, 0, 2).is_defined())
        self.assertFalse(VertexSet.standard(Flavor.CF_C, 0, 1).is_defined())
        self.assertTrue(VertexSet.standard(Flavor.CF_H, 0, 1, 0).is_defined())
        self.assertFalse(VertexSet.standard(Flavor.CF_H, 0, 0, 1).is_defined())
        self.assertTrue(VertexSet.standard(Flavor.CF_H, 1, 0, 0).is_defined())


class ConnectedComponentsTest(SimpleTestCase):
    """Test cases for connected components."""

    def test_single_edge(self):
        """Test that one edge on two vertices is one component."""
        split = connected_components(c_graph((1, 2), [(1, 2)]))
        self.assertEqual(split.components, [((1, 2),)])
        self.assertEqual(split.isolated, ())

    def test_isolated_vertex(self):
        """Test that untouched vertices are reported separately."""
        split = connected_components(c_graph((1, 2, 3), [(1, 2)]))
        self.assertEqual(len(split.components), 1)
        self.assertEqual(split.isolated, (3,))

    def test_shared_target(self):
        """Test that edges meeting at a vertex form one component."""
        split = connected_components(c_graph((1, 2, 3), [(1, 2), (3, 2)]))
        self.assertEqual(split.components, [((1, 2), (3, 2))])


class AdmissibilityTest(SimpleTestCase):
    """Test cases for flavor admissibility."""

    def test_flavor_c(self):
        """Test connectivity and the no-isolated-vertex rule."""
        self.assertTrue(is_admissible(c_graph((1, 2), [(1, 2)])))
        self.assertFalse(is_admissible(c_graph((1, 2, 3), [(1, 2)])))
        self.assertTrue(is_admissible(c_graph((1,), [])))

    def test_boundary_source_rejected(self):
        """Test that CF_H graphs may not have edges leaving boundary vertices."""
        vertices = VertexSet.standard(Flavor.CF_H, 1, 0, 1)
        self.assertFalse(is_admissible(DirectedGraph(vertices, [("b1", 1)])))
        self.assertTrue(is_admissible(DirectedGraph(vertices, [(1, "b1")])))

    def test_free_component_rejected(self):
        """Test that a component living on free vertices only is rejected."""
        vertices = VertexSet(Flavor.CF_C, (1, 2, 3), ("c1",))
        graph = DirectedGraph(vertices, [(1, 2), (2, 1), (3, "c1")])
        self.assertFalse(is_admissible(graph))
        graph = DirectedGraph(vertices, [(1, 2), (2, "c1"), (3, "c1")])
        self.assertTrue(is_admissible(graph))


class CanonicalFormTest(SimpleTestCase):
    """Test cases for canonical edge order."""

    def test_sorted_graph(self):
        """Test that a sorted edge list is unchanged."""
        graph = c_graph((1, 2, 3), [(1, 2), (1, 3)])
        self.assertEqual(canonical_form(graph), (graph, 1))

    def test_transposition(self):
        """Test that one transposition gives sign -1."""
        canonical, sign = canonical_form(c_graph((1, 2, 3), [(1, 3), (1, 2)]))
        self.assertEqual(canonical.edges, ((1, 2), (1, 3)))
        self.assertEqual(sign, -1)

    def test_permutation_parity_exhaustive(self):
        """Test signs against explicit parities for every ordering of four edges."""
        edges = [(1, 2), (2, 3), (3, 4), (4, 1)]
        graph = c_graph((1, 2, 3, 4), edges)
        base_sign = canonical_form(graph).sign
        for permutation in itertools.permutations(range(4)):
            permuted = graph.with_edges(edges[i] for i in permutation)
            canonical, sign = canonical_form(permuted)
            self.assertEqual(canonical_form(canonical), (canonical, 1))
            self.assertEqual(sign * base_sign, brute_force_parity(permutation))
            self.assertEqual(permutation_sign(permutation), brute_force_parity(permutation))


class EnumerationTest(SimpleTestCase):
    """Test cases for graph enumeration."""

    def test_two_vertices_one_edge(self):
        """Test that there are two one-edge graphs on two points."""
        self.assertEqual(len(enumerate_graphs(VertexSet.standard(Flavor.C, 2), 1)), 2)

    def test_eight_collinear_stars(self):
        """Test the eight graphs of the (1, 3) family."""
        vertices = VertexSet.standard(Flavor.CF_C, 1, 3)
        both = lambda g: no_collinear_edges(g) and simple(g)  # noqa: E731
        self.assertEqual(len(enumerate_graphs(vertices, 3, both)), 8)
        alone = enumerate_graphs(vertices, 3, no_collinear_edges)
        self.assertEqual(len(alone), 20)
        self.assertEqual(sum(1 for g in alone if not simple(g)), 12)

    def test_edgeless(self):
        """Test that the edgeless graph is the only zero-edge class."""
        for vertices in (
            VertexSet.standard(Flavor.CF_C, 0, 2),
            VertexSet.standard(Flavor.CF_H, 0, 0, 2),
            VertexSet.standard(Flavor.C, 1),
        ):
            self.assertEqual(len(enumerate_graphs(vertices, 0)), 1)

    def test_connected_graphs_cover_vertices(self):
        """Test that enumerated flavor-C graphs touch every vertex."""
        graphs = enumerate_graphs(VertexSet.standard(Flavor.C, 3), 2)
        self.assertTrue(graphs)
        for graph in graphs:
            for label in graph.vertices.labels:
                self.assertGreater(graph.in_degree(label) + graph.out_degree(label), 0)
        keys = {canonical_form(graph).graph for graph in graphs}
        self.assertEqual(len(keys), len(graphs))

    def test_limit(self):
        """Test the enumeration resource guard."""
        with self.assertRaises(EnumerationLimitExceeded):
            enumerate_graphs(VertexSet.standard(Flavor.C, 4), 3, limit=10)


class GraphSumTest(SimpleTestCase):
    """Test cases for formal sums of graphs."""

    def test_odd_permutation_cancels(self):
        """Test that a graph plus its odd reordering vanishes."""
        graph = c_graph((1, 2, 3), [(1, 2), (1, 3)])
        total = GraphSum.of(graph) + GraphSum.of(graph.with_edges([(1, 3), (1, 2)]))
        self.assertFalse(total)

    def test_coefficient_sign(self):
        """Test that coefficients are read through the edge-order sign."""
        graph = c_graph((1, 2, 3), [(1, 3), (1, 2)])
        total = GraphSum.of(graph, Fraction(1, 2))
        self.assertEqual(total.coefficient(graph), Fraction(1, 2))
        self.assertEqual(total.coefficient(graph.with_edges([(1, 2), (1, 3)])), Fraction(-1, 2))

    def test_free_order_normalized(self):
        """Test that listing free vertices in another order gives the same key."""
        a = DirectedGraph(VertexSet(Flavor.C, (2, 1)), [(1, 2)])
        b = DirectedGraph(VertexSet(Flavor.C, (1, 2)), [(1, 2)])
        self.assertEqual(GraphSum.of(a), GraphSum.of(b))


class EmbeddingTest(SimpleTestCase):
    """Test cases for embeddings and quotients."""

    def setUp(self):
        self.path = c_graph((1, 2, 3), [(1, 2), (2, 3)])

    def test_path_embedding(self):
        """Test the unique embedding of an edge into a path."""
        sub = c_graph((1, 2), [(1, 2)])
        embeddings = find_embeddings(self.path, sub)
        self.assertEqual(len(embeddings), 1)
        self.assertEqual(embeddings[0].edge_injection, (0,))

    def test_identity_embedding(self):
        """Test that a graph embeds in itself exactly once."""
        edge = c_graph((1, 2), [(1, 2)])
        (embedding,) = find_embeddings(edge, edge)
        result = quotient(edge, embedding)
        self.assertEqual(result.quotient.edges, ())
        self.assertEqual(len(result.quotient.vertices), 1)
        self.assertEqual(result.sign, 1)

    def test_missing_edge(self):
        """Test that a sub with a foreign edge does not embed."""
        self.assertEqual(find_embeddings(self.path, c_graph((1, 2), [(2, 1)])), [])

    def test_quotient_prefix(self):
        """Test the quotient of a path by its first edge."""
        (embedding,) = find_embeddings(self.path, c_graph((1, 2), [(1, 2)]))
        result = quotient(self.path, embedding)
        self.assertEqual(result.quotient.edges, (("v", 3),))
        self.assertEqual(result.sign, 1)

    def test_quotient_sign_matches_parity(self):
        """Test the ordering sign against a brute-force parity."""
        for host_edges in ([(2, 3), (1, 2)], [(1, 2), (2, 3)]):
            host = c_graph((1, 2, 3), host_edges)
            sub = c_graph((2, 3), [(2, 3)])
            (embedding,) = find_embeddings(host, sub)
            result = quotient(host, embedding)
            self.assertEqual(result.quotient.edges, ((1, "v"),))
            inside = embedding.edge_injection
            outside = [i for i in range(2) if i not in inside]
            self.assertEqual(result.sign, brute_force_parity(list(inside) + outside))

    def test_tadpole_contraction(self):
        """Test that a contraction repeating an edge is refused."""
        host = c_graph((1, 2, 3), [(1, 2), (2, 1), (2, 3)])
        sub = c_graph((1, 2), [(1, 2), (2, 1)])
        (embedding,) = find_embeddings(host, sub)
        self.assertEqual(quotient(host, embedding).quotient.edges, (("v", 3),))
        host = c_graph((1, 2, 3), [(1, 3), (2, 3), (1, 2)])
        (embedding,) = find_embeddings(host, c_graph((1, 2), [(1, 2)]))
        with self.assertRaises(ContractionError):
            quotient(host, embedding)


class SplittingTest(SimpleTestCase):
    """Test cases for codimension-one splittings."""

    def test_three_points(self):
        """Test that three points collide along the three pairs."""
        found = splittings(VertexSet.standard(Flavor.C, 3))
        self.assertEqual(
            sorted(s.inner.free for s in found), [(1, 2), (1, 3), (2, 3)]
        )

    def test_cf_no_i_type_with_one_free_point(self):
        """Test that one free point admits no free collisions."""
        found = splittings(VertexSet.standard(Flavor.CF_C, 1, 2))
        self.assertNotIn("I", {s.kind for s in found})
        for splitting in found:
            block = splitting.inner.collinear
            self.assertTrue(block)
            start = ("c1", "c2").index(block[0])
            self.assertEqual(block, ("c1", "c2")[start:start + len(block)])

    def test_halfplane_constraints(self):
        """Test the factor cardinality constraints for (0, 1, 1)."""
        found = splittings(VertexSet.standard(Flavor.CF_H, 0, 1, 1))
        for splitting in found:
            self.assertTrue(splitting.inner.is_defined())
            self.assertTrue(splitting.outer.is_defined())
        self.assertEqual(len(found), 2)


class CocompositionTest(SimpleTestCase):
    """Test cases for cocomposition."""

    def test_one_edge(self):
        """Test that a single edge has no proper factorization."""
        self.assertEqual(cocompose(c_graph((1, 2), [(1, 2)])), [])

    def test_path(self):
        """Test the term contracting the first edge of a path."""
        path = c_graph((1, 2, 3), [(1, 2), (2, 3)])
        terms = cocompose(path)
        found = [
            term for term in terms
            if term.right == c_graph((1, 2), [(1, 2)])
        ]
        self.assertEqual(len(found), 1)
        self.assertEqual(found[0].left.coefficient(c_graph(("v", 3), [("v", 3)])), 1)

    def test_halfplane_free_collision(self):
        """Test that a free collision in CF_H has a flavor-C right factor."""
        vertices = VertexSet.standard(Flavor.CF_H, 2, 0, 1)
        graph = DirectedGraph(vertices, [(1, 2), (2, "b1")])
        kinds = {
            (term.splitting.kind, term.right.flavor, term.left.graphs()[0].flavor)
            for term in cocompose(graph)
        }
        self.assertIn(("I", Flavor.C, Flavor.CF_H), kinds)

    def test_coassociativity_exhaustive(self):
        """Test that both nested cocompositions agree on every small admissible graph."""
        for flavor in Flavor:
            with self.subTest(flavor=flavor):
                hosts = small_admissible_graphs(flavor)
                self.assertTrue(hosts)
                nested = 0
                for host in hosts:
                    inner_first = collapse_inner_first(host)
                    self.assertEqual(inner_first, collapse_outer_first(host), host)
                    nested += len(inner_first)
                self.assertGreater(nested, 0)


class OperadCompositionTest(SimpleTestCase):
    """Test cases for the dual operadic composition."""

    def test_unit(self):
        """Test that inserting a single point returns the graph."""
        g1 = c_graph(("v", 3), [("v", 3)])
        self.assertEqual(operad_compose(g1, "v", c_graph(("v",), [])), GraphSum.of(g1))

    def test_path_term(self):
        """Test that inserting an edge into an edge yields the path."""
        g1 = c_graph(("v", 3), [("v", 3)])
        g2 = c_graph((1, 2), [(1, 2)])
        result = operad_compose(g1, "v", g2)
        self.assertEqual(result.coefficient(c_graph((1, 2, 3), [(1, 2), (2, 3)])), 1)
        self.assertEqual(len(result), 2)

    def _check_duality(self, hosts):
        pairs = {}
        for host in hosts:
            for term in cocompose(host, label="v"):
                for g1, _ in term.left.items():
                    pairs[(g1, term.right)] = None
        for g1, g2 in pairs:
            composed = operad_compose(g1, "v", g2)
            sign_g2 = normalize(g2).sign
            for host in hosts:
                paired = sum(
                    (
                        term.left.coefficient(g1) * sign_g2
                        for term in cocompose(host, label="v")
                        if term.right == normalize(g2).graph
                    ),
                    Fraction(0),
                )
                self.assertEqual(composed.coefficient(host), paired, (g1, g2, host))

    def test_duality_flavor_c(self):
        """Test the pairing between composition and cocomposition on small graphs."""
        hosts = []
        for size, edges in ((3, 2), (3, 3), (4, 3)):
            hosts.extend(enumerate_graphs(VertexSet.standard(Flavor.C, size), edges))
        self._check_duality(hosts)

    def test_duality_collinear(self):
        """Test the pairing on graphs with one free and two collinear points."""
        vertices = VertexSet.standard(Flavor.CF_C, 1, 2)
        hosts = []
        for edges in (1, 2, 3):
            hosts.extend(enumerate_graphs(vertices, edges))
        self._check_duality(hosts)

    def test_duality_halfplane(self):
        """Test the pairing on half-plane graphs with free, collinear and boundary points."""
        hosts = []
        for shape in ((1, 1, 1), (2, 0, 1), (1, 0, 2), (0, 2, 1)):
            vertices = VertexSet.standard(Flavor.CF_H, *shape)
            for edges in (1, 2, 3):
                hosts.extend(enumerate_graphs(vertices, edges))
        self.assertTrue(hosts)
        self._check_duality(hosts)

    def test_sequential_associativity(self):
        """Test that nested insertions agree."""
        g1 = c_graph(("v", 9), [("v", 9)])
        g2 = c_graph((1, "w"), [(1, "w")])
        g3 = c_graph((2, 3), [(3, 2)])
        left = compose_sums(operad_compose(g1, "v", g2), "w", GraphSum.of(g3))
        right = compose_sums(GraphSum.of(g1), "v", compose_sums(GraphSum.of(g2), "w", GraphSum.of(g3)))
        self.assertTrue(left)
        self.assertEqual(left, right)

    def test_parallel_associativity(self):
        """Test that insertions at different vertices commute up to the Koszul sign."""
        g1 = c_graph(("u", "v"), [("u", "v")])
        g2 = c_graph((1, 2), [(1, 2)])
        g3 = c_graph((3, 4), [(4, 3)])
        first = compose_sums(operad_compose(g1, "v", g2), "u", GraphSum.of(g3))
        second = compose_sums(operad_compose(g1, "u", g3), "v", GraphSum.of(g2))
        self.assertTrue(first)
        self.assertEqual(first, second * -1)


class GraphSerializerTest(SimpleTestCase):
    """Test cases for the graph JSON format."""

    def test_round_trip(self):
        """Test that edges keep their stored order."""
        data = {"flavor": "CF_C", "free": [1], "collinear": ["c1", "c2"], "edges": [[1, "c2"], [1, "c1"]]}
        graph = load_graph(data)
        self.assertEqual(graph.edges, ((1, "c2"), (1, "c1")))
        self.assertEqual(GraphSerializer(graph).data["edges"], [[1, "c2"], [1, "c1"]])

    def test_rejects_tadpole(self):
        """Test that invalid graphs fail validation."""
        serializer = GraphSerializer(data={"flavor": "C", "free": [1, 2], "edges": [[1, 1]]})
        self.assertFalse(serializer.is_valid())


@override_settings(WORKBENCH_ENUMERATION_LIMIT=2_000_000)
class GraphsCommandTest(SimpleTestCase):
    """Test cases for the graphs management command."""

    def test_enumerate_two_points(self):
        """Test that the command lists the two one-edge graphs."""
        out = StringIO()
        call_command("graphs", "enumerate", "--flavor", "C", "--vertices", "2", "--edges", "1", stdout=out)
        report = json.loads(out.getvalue())
        self.assertEqual(report["schema"], "workbench/graphs-enumerate/v1")
        self.assertEqual(report["count"], 2)

    def test_enumerate_with_filters(self):
        """Test named filters on the command line."""
        out = StringIO()
        call_command(
            "graphs", "enumerate", "--flavor", "CF_C", "--vertices", "1", "--collinear", "3",
            "--edges", "3", "--filter", "no-collinear-edges", "--filter", "simple", stdout=out,
        )
        self.assertEqual(json.loads(out.getvalue())["count"], 8)

    def test_limit_is_usage_error(self):
        """Test that the resource guard maps to exit status 2."""
        with self.assertRaises(CommandError) as ctx:
            call_command(
                "graphs", "enumerate", "--flavor", "C", "--vertices", "4", "--edges", "3",
                "--limit", "10", stdout=StringIO(),
            )
        self.assertEqual(ctx.exception.returncode, 2)
