import json
import tempfile
from fractions import Fraction
from io import StringIO
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase

from apps.core.exceptions import (
    DegreeMismatchError,
    MissingWeightError,
    SingularConfigurationError,
    SliceError,
)
from apps.graphs.structures import (
    DirectedGraph,
    Flavor,
    VertexSet,
    all_of,
    enumerate_graphs,
    no_collinear_edges,
    simple,
)

from . import cache
from .angles import angle_halfplane, angle_plane
from .integration import PartialSum, WeightEstimate, integrate_weight, omega_density, split_samples
from .known import known_weight
from .models import WeightCacheEntry
from .slices import GaugeSlice
from .sources import CorruptedWeights, KnownWeights, MonteCarloWeights


def graph(flavor, shape, edges):
    return DirectedGraph(VertexSet.standard(flavor, *shape), edges)


V13 = ((1, "c1"), (1, "c2"), (1, "c3"))
ODD_GRAPHS = (
    graph(Flavor.CF_C, (2, 1), ((1, "c1"), (2, "c1"), (1, 2))),
    graph(Flavor.CF_C, (2, 1), ((1, "c1"), (2, 1), (2, "c1"))),
    graph(Flavor.CF_C, (1, 2), ((1, "c1"), (1, "c2"))),
    graph(Flavor.CF_C, (1, 2), (("c2", 1), (1, "c1"))),
)


def one_twenty_fourth_family():
    vertices = VertexSet.standard(Flavor.CF_C, 1, 3)
    return enumerate_graphs(vertices, 3, all_of(no_collinear_edges, simple))


class AngleTest(SimpleTestCase):
    """Test cases for the normalized angle functions."""

    def test_plane_angle(self):
        """Test the positive real direction and a quarter turn."""
        self.assertAlmostEqual(float(angle_plane(0, 1)), 0.0)
        self.assertAlmostEqual(float(angle_plane(0, 1j)), 0.25)

    def test_plane_antisymmetry(self):
        """Test that reversing an edge adds half a turn."""
        rng = np.random.default_rng(1)
        a = rng.normal(size=5) + 1j * rng.normal(size=5)
        b = rng.normal(size=5) + 1j * rng.normal(size=5)
        difference = np.mod(angle_plane(a, b) - angle_plane(b, a), 1.0)
        np.testing.assert_allclose(difference, 0.5, atol=1e-12)

    def test_halfplane_angle(self):
        """Test the hyperbolic angle on two explicit pairs."""
        self.assertAlmostEqual(float(angle_halfplane(1j, 2j)), 0.0)
        expected = np.mod(np.angle(1 / (1 + 2j)) / (2 * np.pi), 1.0)
        self.assertAlmostEqual(float(angle_halfplane(1j, 1 + 1j)), expected)

    def test_halfplane_invariance(self):
        """Test invariance under horizontal translation and dilation."""
        i, j = 0.3 + 0.7j, -1.2 + 0.4j
        base = float(angle_halfplane(i, j))
        self.assertAlmostEqual(float(angle_halfplane(i + 3, j + 3)), base)
        self.assertAlmostEqual(float(angle_halfplane(2.5 * i, 2.5 * j)), base)

    def test_coincident_points(self):
        """Test that coincident points are singular."""
        with self.assertRaises(SingularConfigurationError):
            angle_plane(1j, 1j)
        with self.assertRaises(SingularConfigurationError):
            angle_halfplane(2.0, 2.0)


class GaugeSliceTest(SimpleTestCase):
    """Test cases for gauge slices."""

    shapes = [
        (Flavor.C, (2,)),
        (Flavor.C, (3,)),
        (Flavor.C, (4,)),
        (Flavor.CF_C, (1, 1)),
        (Flavor.CF_C, (0, 2)),
        (Flavor.CF_C, (1, 2)),
        (Flavor.CF_C, (1, 3)),
        (Flavor.CF_C, (2, 1)),
        (Flavor.CF_H, (1, 0, 0)),
        (Flavor.CF_H, (1, 0, 1)),
        (Flavor.CF_H, (1, 0, 2)),
        (Flavor.CF_H, (0, 0, 2)),
        (Flavor.CF_H, (0, 1, 0)),
        (Flavor.CF_H, (0, 1, 1)),
        (Flavor.CF_H, (0, 2, 0)),
        (Flavor.CF_H, (1, 1, 2)),
        (Flavor.CF_H, (2, 2, 3)),
    ]

    def slices(self, vertices):
        names = ["default", "alternate"]
        if vertices.flavor != Flavor.CF_H:
            names += ["mirrored", "mirrored-alternate"]
        return [GaugeSlice(vertices, name) for name in names]

    def test_chart_dimension(self):
        """Test that every chart has one coordinate per stratum dimension."""
        for flavor, shape in self.shapes:
            vertices = VertexSet.standard(flavor, *shape)
            for gauge in self.slices(vertices):
                self.assertEqual(gauge.chart.dimension, vertices.dimension, gauge)
                self.assertIn(gauge.orientation, (1, -1))

    def test_undefined_stratum(self):
        """Test that a stratum without configuration space has no slice."""
        with self.assertRaises(SliceError):
            GaugeSlice(VertexSet.standard(Flavor.C, 1))
        with self.assertRaises(SliceError):
            GaugeSlice(VertexSet.standard(Flavor.CF_H, 0, 0, 1))

    def test_unknown_and_mirrored_halfplane(self):
        """Test that mirrored slices exist for plane flavors only."""
        with self.assertRaises(SliceError):
            GaugeSlice(VertexSet.standard(Flavor.CF_H, 1, 0, 2), "mirrored")
        with self.assertRaises(SliceError):
            GaugeSlice(VertexSet.standard(Flavor.C, 2), "sideways")

    def test_two_points(self):
        """Test the circle chart of two points."""
        z, tangents = GaugeSlice(VertexSet.standard(Flavor.C, 2)).configuration(np.array([[0.25]]))
        np.testing.assert_allclose(z[0], [0, 1j], atol=1e-12)
        np.testing.assert_allclose(tangents[0, :, 0], [0, -2 * np.pi], atol=1e-12)

    def test_collinear_order(self):
        """Test that collinear points stay on the real axis in their order."""
        vertices = VertexSet.standard(Flavor.CF_C, 2, 3)
        u = np.random.default_rng(2).random((50, vertices.dimension))
        for name in ("default", "alternate"):
            z, _ = GaugeSlice(vertices, name).configuration(u)
            collinear = z[:, 2:]
            np.testing.assert_allclose(collinear.imag, 0, atol=1e-12)
            self.assertTrue(np.all(np.diff(collinear.real, axis=1) > 0))

    def test_halfplane_configurations(self):
        """Test that half-plane charts land in the closed upper half-plane."""
        vertices = VertexSet.standard(Flavor.CF_H, 2, 2, 3)
        u = np.random.default_rng(3).random((50, vertices.dimension))
        for name in ("default", "alternate"):
            z, _ = GaugeSlice(vertices, name).configuration(u)
            self.assertTrue(np.all(z[:, :2].imag > 0))
            self.assertTrue(np.all(z[:, 2:4].imag > 0))
            np.testing.assert_allclose(z[:, 2].imag, z[:, 3].imag)
            np.testing.assert_allclose(z[:, 4:].imag, 0, atol=1e-12)
            self.assertTrue(np.all(np.diff(z[:, 4:].real, axis=1) > 0))


class DensityTest(SimpleTestCase):
    """Test cases for the density of the pulled-back form."""

    def test_edgeless_point_stratum(self):
        """Test that the edgeless graph on a point stratum has density one."""
        g = graph(Flavor.CF_C, (0, 2), ())
        np.testing.assert_array_equal(omega_density(g, np.zeros((4, 0))), np.ones(4))

    def test_degree_mismatch(self):
        """Test that a form of the wrong degree is rejected."""
        g = graph(Flavor.C, (3,), ((1, 2),))
        with self.assertRaises(DegreeMismatchError):
            omega_density(g, np.zeros((1, 3)))
        with self.assertRaises(DegreeMismatchError):
            integrate_weight(g)

    def test_equal_angle_forms(self):
        """Test that two edges with the same angle form give density zero."""
        g = graph(Flavor.C, (3,), ((1, 2), (2, 1), (1, 3)))
        density = omega_density(g, np.array([[0.3, 0.4, 0.6]]))
        self.assertAlmostEqual(float(density[0]), 0.0, places=9)

    def test_circle_density(self):
        """Test that the angle of two points is the chart coordinate."""
        g = graph(Flavor.C, (2,), ((1, 2),))
        np.testing.assert_allclose(omega_density(g, np.array([[0.1], [0.7]])), [1.0, 1.0])


class IntegrationTest(SimpleTestCase):
    """Test cases for numerical weights."""

    def test_split_samples(self):
        """Test the deterministic split of samples among workers."""
        self.assertEqual(split_samples(10, 3), [4, 3, 3])
        self.assertEqual(sum(split_samples(65537, 4)), 65537)

    def test_partial_sums(self):
        """Test the reduction of partial sums."""
        first, second = PartialSum(), PartialSum()
        first.add(np.array([1.0, 2.0]))
        second.add(np.array([3.0]))
        first.combine_with(second)
        self.assertEqual(first.count, 3)
        self.assertAlmostEqual(first.mean(), 2.0)
        self.assertAlmostEqual(first.stderr(), np.sqrt(1.0 / 3))

    def test_point_stratum(self):
        """Test that an edgeless point stratum has weight exactly one."""
        estimate = integrate_weight(graph(Flavor.CF_C, (0, 2), ()))
        self.assertEqual(estimate.method, "exact")
        self.assertEqual(estimate.exact, Fraction(1))
        self.assertEqual(estimate.value, 1.0)

    def test_two_point_weights(self):
        """Test that both one-edge graphs on two points have weight one."""
        for edges in (((1, 2),), ((2, 1),)):
            for name in ("default", "alternate", "mirrored", "mirrored-alternate"):
                estimate = integrate_weight(graph(Flavor.C, (2,), edges), name)
                self.assertEqual(estimate.method, "quadrature")
                self.assertAlmostEqual(estimate.value, 1.0, delta=1e-6)

    def test_one_point_over_a_line(self):
        """Test the weight of a free point joined to one collinear point."""
        for edges in (((1, "c1"),), (("c1", 1),)):
            estimate = integrate_weight(graph(Flavor.CF_C, (1, 1), edges))
            self.assertAlmostEqual(estimate.value, 1.0, delta=1e-6)

    def test_halfplane_stars(self):
        """Test the stars of one interior point over the boundary."""
        for name in ("default", "alternate"):
            estimate = integrate_weight(graph(Flavor.CF_H, (1, 0, 1), ((1, "b1"),)), name)
            self.assertAlmostEqual(estimate.value, 1.0, delta=1e-6)
        forward = integrate_weight(graph(Flavor.CF_H, (1, 0, 2), ((1, "b1"), (1, "b2"))))
        backward = integrate_weight(graph(Flavor.CF_H, (1, 0, 2), ((1, "b2"), (1, "b1"))))
        self.assertTrue(forward.agrees_with(Fraction(1, 2), 1e-2))
        self.assertTrue(backward.agrees_with(Fraction(-1, 2), 1e-2))

    def test_one_twenty_fourth(self):
        """Test a graph of the (1, 3) family against 1/24."""
        estimate = integrate_weight(graph(Flavor.CF_C, (1, 3), V13), samples=200000, seed=7)
        self.assertEqual(estimate.method, "monte-carlo")
        self.assertTrue(estimate.agrees_with(Fraction(1, 24), 1e-2), estimate)

    def test_one_twenty_fourth_family(self):
        """Test every graph of the (1, 3) family against its signed 1/24."""
        family = one_twenty_fourth_family()
        self.assertEqual(len(family), 8)
        for g in family:
            with self.subTest(graph=str(g)):
                expected = known_weight(g)
                self.assertEqual(abs(expected), Fraction(1, 24))
                estimate = integrate_weight(g, samples=40000, seed=7)
                self.assertLessEqual(abs(estimate.value - float(expected)), max(3e-2, 4 * estimate.stderr))

    def test_three_point_family_vanishes(self):
        """Test that every top graph on three points integrates to zero."""
        family = enumerate_graphs(VertexSet.standard(Flavor.C, 3), 3)
        self.assertTrue(family)
        for g in family:
            with self.subTest(graph=str(g)):
                self.assertEqual(known_weight(g), 0)
                estimate = integrate_weight(g, samples=20000, seed=19)
                self.assertLessEqual(abs(estimate.value), max(2e-2, 4 * estimate.stderr))

    def test_odd_weights_vanish(self):
        """Test that graphs with p + q odd integrate to zero within four standard errors."""
        for g in ODD_GRAPHS:
            with self.subTest(graph=str(g)):
                self.assertEqual(known_weight(g), 0)
                estimate = integrate_weight(g, samples=40000, seed=23, method="monte-carlo")
                self.assertEqual(estimate.method, "monte-carlo")
                self.assertLessEqual(abs(estimate.value), 4 * estimate.stderr + 1e-12)

    def test_three_points_vanish(self):
        """Test that a top graph on three points has weight zero."""
        g = graph(Flavor.C, (3,), ((1, 2), (2, 3), (1, 3)))
        estimate = integrate_weight(g, samples=50000, seed=11)
        self.assertLessEqual(abs(estimate.value), max(2e-2, 4 * estimate.stderr))

    def test_determinism(self):
        """Test that equal parameters give identical estimates."""
        g = graph(Flavor.CF_C, (1, 3), V13)
        first = integrate_weight(g, samples=3000, seed=5)
        second = integrate_weight(g, samples=3000, seed=5)
        self.assertEqual(first, second)
        self.assertNotEqual(first.value, integrate_weight(g, samples=3000, seed=6).value)

    def test_parallel_determinism(self):
        """Test that a fixed worker count gives identical estimates."""
        g = graph(Flavor.CF_C, (1, 3), V13)
        first = integrate_weight(g, samples=4000, seed=5, workers=2)
        second = integrate_weight(g, samples=4000, seed=5, workers=2)
        self.assertEqual(first, second)
        self.assertEqual(first.workers, 2)
        self.assertEqual(first.samples, 4000)

    def test_mirror_identity(self):
        """Test that mirrored slices give the reflection sign on the same samples."""
        cases = [
            (graph(Flavor.CF_C, (1, 3), V13), 1),
            (graph(Flavor.CF_C, (2, 1), ((1, "c1"), (2, "c1"), (1, 2))), -1),
            (graph(Flavor.C, (3,), ((1, 2), (2, 3), (1, 3))), -1),
        ]
        for g, sign in cases:
            default = integrate_weight(g, "default", samples=5000, seed=3)
            mirrored = integrate_weight(g, "mirrored", samples=5000, seed=3)
            self.assertAlmostEqual(mirrored.value, sign * default.value, places=12)

    def test_gauge_independence(self):
        """Test that the two documented slices agree within error bars."""
        graphs = [
            graph(Flavor.CF_C, (1, 3), V13),
            graph(Flavor.CF_C, (1, 3), (("c1", 1), (1, "c3"), (1, "c2"))),
            graph(Flavor.CF_C, (2, 1), ((1, "c1"), (2, "c1"), (1, 2))),
        ]
        for g in graphs:
            default = integrate_weight(g, "default", samples=100000, seed=13)
            alternate = integrate_weight(g, "alternate", samples=100000, seed=17)
            combined = np.hypot(default.stderr, alternate.stderr)
            self.assertLessEqual(abs(default.value - alternate.value), max(2e-2, 4 * combined), g)

    def test_agreement_rule(self):
        """Test the tolerance rule of an estimate."""
        estimate = WeightEstimate(0.05, 0.01, 100, 1, None)
        self.assertTrue(estimate.agrees_with(Fraction(1, 24), 1e-3))
        self.assertFalse(estimate.agrees_with(0.1, 1e-3))


class KnownWeightTest(SimpleTestCase):
    """Test cases for the table of known weights."""

    def test_two_points(self):
        """Test the two one-edge graphs on two points."""
        self.assertEqual(known_weight(graph(Flavor.C, (2,), ((1, 2),))), 1)
        self.assertEqual(known_weight(graph(Flavor.C, (2,), ((2, 1),))), 1)

    def test_vanishing(self):
        """Test the vanishing rules."""
        zero = Fraction(0)
        self.assertEqual(known_weight(graph(Flavor.C, (3,), ((1, 2), (2, 3), (3, 1)))), zero)
        collinear = graph(Flavor.CF_C, (1, 3), (("c1", "c2"), (1, "c1"), (1, "c3")))
        self.assertEqual(known_weight(collinear), zero)
        self.assertEqual(known_weight(graph(Flavor.CF_C, (2, 1), ((1, "c1"), (2, "c1"), (1, 2)))), zero)
        self.assertEqual(known_weight(graph(Flavor.CF_C, (1, 2), ((1, "c1"), (1, "c2")))), zero)
        self.assertEqual(known_weight(graph(Flavor.CF_H, (1, 0, 2), (("b1", 1), (1, "b2")))), zero)

    def test_one_twenty_fourth(self):
        """Test the signed 1/24 weights."""
        self.assertEqual(known_weight(graph(Flavor.CF_C, (1, 3), V13)), Fraction(1, 24))
        swapped = graph(Flavor.CF_C, (1, 3), ((1, "c2"), (1, "c1"), (1, "c3")))
        self.assertEqual(known_weight(swapped), Fraction(-1, 24))
        reversed_edge = graph(Flavor.CF_C, (1, 3), (("c1", 1), (1, "c2"), (1, "c3")))
        self.assertEqual(known_weight(reversed_edge), Fraction(1, 24))

    def test_halfplane_stars(self):
        """Test the stars over the boundary."""
        self.assertEqual(known_weight(graph(Flavor.CF_H, (1, 0, 2), ((1, "b1"), (1, "b2")))), Fraction(1, 2))
        self.assertEqual(known_weight(graph(Flavor.CF_H, (1, 0, 2), ((1, "b2"), (1, "b1")))), Fraction(-1, 2))
        hkr = graph(Flavor.CF_H, (0, 1, 3), (("c1", "b1"), ("c1", "b2"), ("c1", "b3")))
        self.assertEqual(known_weight(hkr), Fraction(1, 6))

    def test_unknown(self):
        """Test that graphs without a closed form and non-top graphs give None."""
        self.assertIsNone(known_weight(graph(Flavor.CF_H, (2, 0, 0), ((1, 2), (2, 1)))))
        self.assertIsNone(known_weight(graph(Flavor.C, (3,), ((1, 2),))))


class WeightSourceTest(SimpleTestCase):
    """Test cases for weight sources."""

    def test_known_source(self):
        """Test exact weights and missing ones."""
        source = KnownWeights()
        self.assertEqual(source(graph(Flavor.C, (2,), ((1, 2),))), Fraction(1))
        with self.assertRaises(MissingWeightError):
            source(graph(Flavor.CF_H, (2, 0, 0), ((1, 2), (2, 1))))

    def test_label_free_memo(self):
        """Test that relabeled graphs share one numerical estimate."""
        source = MonteCarloWeights(samples=1000, seed=1, known="none", use_cache=False)
        first = source.estimate(graph(Flavor.C, (2,), ((1, 2),)))
        relabeled = DirectedGraph(VertexSet(Flavor.C, (5, 7)), ((5, 7),))
        second = source.estimate(relabeled)
        self.assertEqual(len(source._memo), 1)
        self.assertEqual(first.value, second.value)
        self.assertEqual(second.graph, relabeled)
        self.assertAlmostEqual(source(relabeled), 1.0, delta=1e-6)

    def test_known_zeros_only(self):
        """Test that the zeros mode keeps vanishing weights exact."""
        source = MonteCarloWeights(samples=1000, seed=1, known="zeros", use_cache=False)
        zero = graph(Flavor.C, (3,), ((1, 2), (2, 3), (3, 1)))
        self.assertEqual(source(zero), Fraction(0))
        self.assertIsInstance(source(graph(Flavor.C, (2,), ((1, 2),))), float)

    def test_corrupted_source(self):
        """Test the negative control source."""
        target = graph(Flavor.C, (2,), ((1, 2),))
        source = CorruptedWeights(KnownWeights(), target, Fraction(1, 2))
        self.assertEqual(source(target), Fraction(3, 2))
        self.assertEqual(source(graph(Flavor.C, (2,), ((2, 1),))), Fraction(1))


class WeightCacheTest(TestCase):
    """Test cases for the ORM weight cache."""

    def test_structure_hash_ignores_labels(self):
        """Test that the cache key depends on structure only."""
        first = graph(Flavor.C, (2,), ((1, 2),))
        second = DirectedGraph(VertexSet(Flavor.C, ("p", "q")), (("p", "q"),))
        self.assertEqual(cache.structure_hash(first), cache.structure_hash(second))
        self.assertNotEqual(cache.structure_hash(first), cache.structure_hash(graph(Flavor.C, (2,), ((2, 1),))))

    def test_insert_only(self):
        """Test that entries are stored once and read back."""
        g = graph(Flavor.CF_C, (1, 3), V13)
        estimate = WeightEstimate(0.0417, 0.001, 1000, 9, g, "default", 1, "monte-carlo")
        self.assertTrue(cache.store(estimate))
        self.assertFalse(cache.store(estimate))
        self.assertEqual(WeightCacheEntry.objects.count(), 1)
        found = cache.lookup(g, "default", 1000, 9, 1)
        self.assertEqual(found.value, 0.0417)
        self.assertIsNone(cache.lookup(g, "default", 1000, 9, 2))

    def test_source_uses_cache(self):
        """Test that a new source reads a stored estimate."""
        g = graph(Flavor.CF_C, (1, 3), V13)
        first = MonteCarloWeights(samples=2000, seed=4, known="none").estimate(g)
        self.assertEqual(WeightCacheEntry.objects.count(), 1)
        second = MonteCarloWeights(samples=2000, seed=4, known="none").estimate(g)
        self.assertEqual(first.value, second.value)
        self.assertEqual(WeightCacheEntry.objects.count(), 1)


class WeightCommandTest(TestCase):
    """Test cases for the weight management command."""

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.addCleanup(self.directory.cleanup)

    def write_graph(self, data):
        path = Path(self.directory.name) / "graph.json"
        path.write_text(json.dumps(data), encoding="utf-8")
        return str(path)

    def test_compute_two_points(self):
        """Test the weight report of a one-edge graph."""
        path = self.write_graph({"flavor": "C", "free": [1, 2], "edges": [[1, 2]]})
        out = StringIO()
        call_command("weight", "compute", "--graph", path, stdout=out, stderr=StringIO())
        report = json.loads(out.getvalue())
        self.assertEqual(report["schema"], "workbench/weight/v1")
        self.assertAlmostEqual(report["value"], 1.0, delta=1e-6)
        self.assertEqual(report["method"], "quadrature")
        self.assertEqual(report["status"], "PASS")
        self.assertEqual(report["workers"], 1)

    def test_compute_wrong_expectation(self):
        """Test that a failed comparison exits with status 1."""
        path = self.write_graph({"flavor": "C", "free": [1, 2], "edges": [[2, 1]]})
        with self.assertRaises(CommandError) as ctx:
            call_command("weight", "compute", "--graph", path, "--expect", "1/2", stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 1)

    def test_compute_invalid_graph(self):
        """Test that a malformed graph exits with status 2."""
        path = self.write_graph({"flavor": "C", "free": [1, 2], "edges": [[1, 1]]})
        with self.assertRaises(CommandError) as ctx:
            call_command("weight", "compute", "--graph", path, stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)

    def test_table_of_eight(self):
        """Test the known weights of the eight (1, 3) graphs."""
        out = StringIO()
        call_command(
            "weight", "table", "--flavor", "CF_C", "--vertices", "1", "--collinear", "3",
            "--filter", "no-collinear-edges", "--filter", "simple", stdout=out, stderr=StringIO(),
        )
        report = json.loads(out.getvalue())
        self.assertEqual(report["count"], 8)
        self.assertEqual({row["known"] for row in report["rows"]}, {"1/24", "-1/24"})

    def test_table_of_eight_integrated(self):
        """Test that the integrated (1, 3) table agrees with the signed 1/24."""
        out = StringIO()
        call_command(
            "weight", "table", "--flavor", "CF_C", "--vertices", "1", "--collinear", "3",
            "--filter", "no-collinear-edges", "--filter", "simple", "--integrate",
            "--samples", "40000", "--seed", "7", "--tolerance", "0.03", stdout=out, stderr=StringIO(),
        )
        report = json.loads(out.getvalue())
        self.assertTrue(report["integrated"])
        self.assertEqual(report["count"], 8)
        self.assertEqual({row["status"] for row in report["rows"]}, {"PASS"})
        for row in report["rows"]:
            self.assertEqual(abs(Fraction(row["known"])), Fraction(1, 24))

    def test_table_csv(self):
        """Test the CSV rendering of a table."""
        out = StringIO()
        call_command(
            "weight", "table", "--flavor", "C", "--vertices", "2", "--integrate", "--format", "csv",
            stdout=out, stderr=StringIO(),
        )
        lines = out.getvalue().splitlines()
        self.assertEqual(lines[0], "index,graph,known,value,stderr,status")
        self.assertEqual(len(lines), 3)
        self.assertTrue(all(line.endswith("PASS") for line in lines[1:]))

    def test_table_undefined_stratum(self):
        """Test that an empty configuration space is a usage error."""
        with self.assertRaises(CommandError) as ctx:
            call_command("weight", "table", "--flavor", "C", "--vertices", "1", stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)
