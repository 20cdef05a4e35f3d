import json
from fractions import Fraction
from io import StringIO

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase

from apps.core.exceptions import (
    AlgebraError,
    DegreeMismatchError,
    NotMaurerCartanError,
    SliceError,
    WorkbenchError,
)
from apps.graphs.structures import DirectedGraph, Flavor, VertexSet
from apps.polyvector.algebra import Space, parse_polyvector, schouten
from apps.polyvector.sampling import random_polyvector
from apps.weights.sources import CorruptedWeights, KnownWeights, MonteCarloWeights

from .components import StructureComponents, bounded_out_degree
from .relations import RelationReport, check_arity, draw, draw_function, twisted_mc_details, verify_relation
from .stokes import stokes_check
from .strata import boundary_strata
from .twisting import arity_bound, check_maurer_cartan, twist


def graph(flavor, shape, edges):
    return DirectedGraph(VertexSet.standard(flavor, *shape), edges)


CF14 = VertexSet.standard(Flavor.CF_C, 1, 4)
STAR_FAMILY = (
    ((1, "c1"), (1, "c2"), (1, "c3")),
    ((1, "c1"), (1, "c2"), (1, "c4")),
    ((1, "c2"), (1, "c3"), (1, "c4")),
)


class BoundaryStrataTest(SimpleTestCase):
    """Test cases for the codimension-one strata."""

    def test_three_points(self):
        """Test that three points have the three pair collisions."""
        strata = boundary_strata(Flavor.C, free=3)
        self.assertEqual(len(strata), 3)
        self.assertEqual({term.kind for term in strata}, {"C"})
        self.assertEqual(sorted(dict(term.subsets)["S"] for term in strata), [(1, 2), (1, 3), (2, 3)])
        self.assertTrue(all(term.sign in (-1, 1) for term in strata))

    def test_no_free_collisions_with_one_free_point(self):
        """Test that (1, 2) has no collisions of free points away from the line."""
        strata = boundary_strata(Flavor.CF_C, free=1, collinear=2)
        self.assertTrue(strata)
        self.assertNotIn("I", {term.kind for term in strata})
        for term in strata:
            self.assertTrue(dict(term.subsets)["T"])

    def test_halfplane_factors_defined(self):
        """Test that every (0, 1, 1) stratum has defined factors."""
        strata = boundary_strata(VertexSet.standard(Flavor.CF_H, 0, 1, 1))
        self.assertEqual(len(strata), 2)
        for term in strata:
            self.assertTrue(term.inner.is_defined())
            self.assertTrue(term.outer.is_defined())
            self.assertEqual(term.describe()["sign"], term.sign)

    def test_undefined_space(self):
        """Test that a single point has no strata."""
        with self.assertRaises(SliceError):
            boundary_strata(Flavor.C, free=1)


class StokesTest(TestCase):
    """Test cases for the boundary identities."""

    def test_jacobi_family(self):
        """Test that every two-edge graph on three points balances exactly."""
        report = stokes_check(VertexSet.standard(Flavor.C, 3), KnownWeights(), tolerance=0.0)
        self.assertEqual(len(report.rows), 12)
        self.assertTrue(report.passed, report.describe())
        self.assertEqual(report.residual_norm, 0.0)

    def test_one_twenty_fourth_stars(self):
        """Test the stars over four collinear points with the known weights."""
        graphs = [DirectedGraph(CF14, edges) for edges in STAR_FAMILY]
        report = stokes_check(CF14, KnownWeights(), tolerance=0.0, graphs=graphs)
        self.assertTrue(report.passed, report.describe())
        for row in report.rows:
            self.assertTrue(row.terms)
            self.assertEqual(row.exact, Fraction(0))

    def test_halfplane_edge(self):
        """Test a single edge from a free point to the boundary."""
        vertices = VertexSet.standard(Flavor.CF_H, 1, 0, 2)
        report = stokes_check(vertices, KnownWeights(), tolerance=0.0, graphs=[DirectedGraph(vertices, ((1, "b1"),))])
        self.assertTrue(report.passed, report.describe())
        self.assertEqual(len(report.rows[0].terms), 2)

    def test_monte_carlo_weights(self):
        """Test the star identity with integrated weights of the (1, 3) factors."""
        source = MonteCarloWeights(samples=2000, seed=3, known="zeros")
        report = stokes_check(CF14, source, graphs=[DirectedGraph(CF14, STAR_FAMILY[0])])
        self.assertTrue(report.passed, report.describe())
        self.assertIsNone(report.rows[0].exact)

    def test_corrupted_weight_fails(self):
        """Test that shifting the two-point weights breaks an identity."""
        vertices = VertexSet.standard(Flavor.CF_H, 2, 0, 1)
        g = DirectedGraph(vertices, ((1, 2), (2, "b1")))
        source = KnownWeights()
        for edges in (((1, 2),), ((2, 1),)):
            source = CorruptedWeights(source, graph(Flavor.C, (2,), edges), Fraction(1, 10))
        report = stokes_check(vertices, source, tolerance=1e-3, graphs=[g])
        self.assertFalse(report.passed)
        self.assertEqual(report.describe()["status"], "FAIL")

    def test_degree_mismatch(self):
        """Test that graphs with the wrong edge count are rejected."""
        with self.assertRaises(DegreeMismatchError):
            stokes_check(CF14, KnownWeights(), graphs=[DirectedGraph(CF14, STAR_FAMILY[0][:2])])

    def test_point_stratum(self):
        """Test that a zero-dimensional space has no boundary."""
        with self.assertRaises(SliceError):
            stokes_check(VertexSet.standard(Flavor.CF_C, 0, 2), KnownWeights())


class ComponentTest(SimpleTestCase):
    """Test cases for the structure components."""

    def setUp(self):
        self.space = Space(2, truncation=4)
        self.structure = StructureComponents(self.space, KnownWeights())
        rng = np.random.default_rng(21)
        self.inputs = [
            random_polyvector(self.space, rng, int(rng.integers(0, 3)), max_polynomial_degree=2, terms=2)
            for _ in range(8)
        ]

    def test_lambda_is_schouten(self):
        """Test that the two-point component is the Schouten bracket."""
        bracket = self.structure.lam(2)
        for a, b in zip(self.inputs[::2], self.inputs[1::2], strict=True):
            self.assertEqual(bracket(a, b), schouten(a, b))

    def test_adjoint_action(self):
        """Test that V_{1,1} is the adjoint action."""
        action = self.structure.V(1, 1)
        for x, a in zip(self.inputs[::2], self.inputs[1::2], strict=True):
            self.assertEqual(action(x, a), schouten(x, a))

    def test_wedge_and_product(self):
        """Test that nu_2 is the wedge product and mu_2 the product of functions."""
        a, b = self.inputs[:2]
        self.assertEqual(self.structure.nu(2)(a, b), a * b)
        f, g = self.space.x(1) * self.space.x(2), self.space.x(2)
        self.assertEqual(self.structure.mu(2)(f, g), f * g)

    def test_vanishing_components(self):
        """Test that lambda_3 and nu_3 have no weighted graphs."""
        self.assertIsNone(self.structure.find(VertexSet.standard(Flavor.C, 3), "lambda_3"))
        self.assertIsNone(self.structure.find(VertexSet.standard(Flavor.CF_C, 0, 3), "nu_3"))
        self.assertFalse(self.structure.lam(3)(*self.inputs[:3]))

    def test_degrees(self):
        """Test the operator degrees of the components."""
        self.assertEqual(self.structure.lam(2).degree, -1)
        self.assertEqual(self.structure.V(1, 3).degree, -3)
        self.assertEqual(self.structure.U(1, 2).degree, -2)

    def test_exotic_weights(self):
        """Test that V_{1,3} has the eight graphs of weight 1/24 up to sign."""
        rows = self.structure.weights(VertexSet.standard(Flavor.CF_C, 1, 3))
        self.assertEqual(len(rows), 8)
        self.assertEqual({abs(row["weight"]) for row in rows}, {Fraction(1, 24)})

    def test_bounded_out_degree(self):
        """Test the out-degree bound on free vertices."""
        bound = bounded_out_degree("free", 2)
        self.assertTrue(bound(graph(Flavor.CF_C, (1, 3), ((1, "c1"), (1, "c2"), ("c3", 1)))))
        self.assertFalse(bound(graph(Flavor.CF_C, (1, 3), ((1, "c1"), (1, "c2"), (1, "c3")))))


class RelationTest(SimpleTestCase):
    """Test cases for the relation checks with the closed-form weights."""

    def setUp(self):
        self.structure = StructureComponents(Space(2, truncation=5), KnownWeights())

    def assertHolds(self, relation, arity=None):
        report = verify_relation(self.structure, relation, arity)
        self.assertIsInstance(report, RelationReport)
        self.assertTrue(report.passed, report.describe())
        self.assertEqual(report.residual_norm, 0.0)
        self.assertEqual(len(report.details), 5)

    def test_jacobi(self):
        """Test the Jacobi identity of lambda_2."""
        self.assertHolds("lambda-jacobi")

    def test_higher_lambda(self):
        """Test that lambda_3 and lambda_4 vanish."""
        self.assertHolds("lambda-higher", 3)
        self.assertHolds("lambda-higher", 4)

    def test_associativity(self):
        """Test associativity of nu and mu."""
        self.assertHolds("nu-associativity")
        self.assertHolds("mu-associativity")

    def test_derivation(self):
        """Test that V_{1,1} is a derivation of the wedge product."""
        self.assertHolds("v11-derivation")

    def test_exotic_cocycle(self):
        """Test that V_{1,3}(x) is a Hochschild cocycle on functions."""
        self.assertHolds("v13-closed")

    def test_hkr(self):
        """Test the HKR cocycles and the collinear stars."""
        for arity in (1, 2, 3):
            self.assertHolds("hkr-cocycle", arity)
            self.assertHolds("z-hkr", arity)

    def test_unknown_relation(self):
        """Test that unknown relations and arities are rejected."""
        with self.assertRaises(AlgebraError):
            check_arity("lambda-higher", 7)
        with self.assertRaises(WorkbenchError):
            check_arity("pentagon", None)
        self.assertEqual(check_arity("v13-closed", None), 5)

    def test_report_fields(self):
        """Test the report layout."""
        report = verify_relation(self.structure, "lambda-jacobi", seeds=(3,))
        described = report.describe()
        self.assertEqual(
            set(described), {"relation", "arity", "status", "residual_norm", "tolerance", "seeds", "details"}
        )
        self.assertEqual(described["status"], "PASS")
        self.assertEqual(described["seeds"], [3])


class TwistTest(SimpleTestCase):
    """Test cases for twisting by a Maurer-Cartan element."""

    def setUp(self):
        self.space = Space(2, truncation=5)
        self.structure = StructureComponents(self.space, KnownWeights())
        self.pi = parse_polyvector("x2*psi1*psi2", self.space)

    def test_check_maurer_cartan(self):
        """Test the accepted and rejected elements."""
        self.assertEqual(check_maurer_cartan(self.pi), 2)
        self.assertEqual(check_maurer_cartan(self.space.zero()), 0)
        with self.assertRaises(NotMaurerCartanError):
            check_maurer_cartan(parse_polyvector("x1 + psi1*psi2", self.space))
        with self.assertRaises(NotMaurerCartanError):
            check_maurer_cartan(self.space.psi(1))
        space = Space(3)
        with self.assertRaises(NotMaurerCartanError):
            check_maurer_cartan(parse_polyvector("x1*psi1*psi2 + x2*psi2*psi3", space))

    def test_zero_element(self):
        """Test that twisting by zero changes nothing."""
        twisted = twist(self.structure, self.space.zero(), 1)
        self.assertEqual(set(twisted.nu), {0})
        a, b = self.space.x(1) * self.space.psi(2), self.space.x(2)
        self.assertEqual(twisted.nu_component(0, 2)(a, b), a * b)
        self.assertIsNone(twisted.nu_component(1, 1))

    def test_first_order(self):
        """Test that the first order is the bracket with pi next to the wedge product."""
        twisted = twist(self.structure, self.pi, 1)
        rng = np.random.default_rng(8)
        for _ in range(4):
            a = random_polyvector(self.space, rng, int(rng.integers(0, 3)), terms=2)
            self.assertEqual(twisted.nu_component(1, 1)(a), schouten(self.pi, a))
        self.assertIsNotNone(twisted.nu_component(1, 3))
        self.assertIsNone(twisted.nu_component(1, 2))
        f, g = self.space.x(1), self.space.x(2)
        self.assertEqual(twisted.mu_component(1, 2)(f, g), self.space.x(2).scale(Fraction(1, 2)))
        self.assertEqual(twisted.hkr_component(0, 1)(self.space.psi(1), self.space.x(1)), self.space.one())

    def test_twisted_maurer_cartan(self):
        """Test the twisted equations through the derivation and cocycle conditions."""
        details = twisted_mc_details(self.structure, self.pi, 1, 4, seeds=(0, 1))
        checked = [
            row for row in details
            if not (row["family"] == "nu" and row["power"] == 1 and row["arity"] == 4)
        ]
        self.assertTrue(checked)
        self.assertEqual({row["power"] for row in details if row["family"] == "hkr"}, {0})
        for row in checked:
            self.assertEqual(row["residual_norm"], 0.0, row)

    def test_hkr_lowest_order(self):
        """Test that Z^pi at order zero is the collinear star component."""
        twisted = twist(self.structure, self.pi, 1)
        rng = np.random.default_rng(11)
        for psi_degree in range(3):
            self.assertEqual(twisted.hkr_arity(psi_degree, 1), psi_degree)
            gamma = draw(self.space, rng, psi_degree=psi_degree)
            functions = [draw_function(self.space, rng) for _ in range(psi_degree)]
            expected = self.structure.Z(0, 1, psi_degree)(gamma, *functions)
            self.assertEqual(twisted.hkr_component(0, psi_degree)(gamma, *functions), expected)
            self.assertEqual(twisted.hkr_cochain(gamma, 0)(*functions), expected)
        self.assertIsNone(twisted.hkr_component(2, 1))

    def test_hkr_first_order(self):
        """Test that Z^pi at order one is Z_{1,1,n} with pi in the free slot."""
        structure = StructureComponents(self.space, MonteCarloWeights(samples=64, seed=5, use_cache=False))
        twisted = twist(structure, self.pi, 1)
        gamma = parse_polyvector("x1*psi2 + x2^2*psi1", self.space)
        f = parse_polyvector("x1^2*x2 + x2", self.space)
        component = twisted.hkr_component(1, 1)
        found = component(gamma, f) if component is not None else self.space.zero()
        self.assertEqual(found, structure.Z(1, 1, 1)(self.pi, gamma, f))
        self.assertEqual(twisted.hkr_cochain(gamma, 1)(f), found)
        self.assertEqual(set(twisted.hkr_series(gamma)), {0, 1})

    def test_hkr_commutes_at_lowest_order(self):
        """Test that Z^pi intertwines the twisted differentials at order zero."""
        twisted = twist(self.structure, self.pi, 1)
        rng = np.random.default_rng(12)
        for psi_degree in range(3):
            gamma = draw(self.space, rng, psi_degree=psi_degree)
            functions = [draw_function(self.space, rng) for _ in range(psi_degree + 1)]
            self.assertFalse(twisted.hkr_defect(gamma, 0, functions), psi_degree)

    def test_hkr_zero_element(self):
        """Test that twisting by zero leaves no higher orders of Z^pi."""
        twisted = twist(self.structure, self.space.zero(), 2)
        gamma = self.space.x(1) * self.space.psi(2)
        functions = [self.space.x(2), self.space.x(1)]
        for power in (1, 2):
            self.assertIsNone(twisted.hkr_component(power, 1))
            self.assertTrue(twisted.hkr_cochain(gamma, power).is_zero)
            self.assertFalse(twisted.hkr_defect(gamma, power, functions))
        self.assertFalse(twisted.hkr_defect(gamma, 0, functions))
        with self.assertRaises(AlgebraError):
            twisted.hkr_cochain(self.space.x(1) + self.space.psi(1), 0)

    def test_arity_bound(self):
        """Test the arities kept per power."""
        self.assertEqual(arity_bound(4, 1), 4)
        self.assertEqual(arity_bound(4, 2), 3)
        self.assertEqual(arity_bound(4, 0), 4)

    def test_invalid_order(self):
        """Test that a negative order is rejected."""
        with self.assertRaises(AlgebraError):
            twist(self.structure, self.pi, -1)


class RelationCommandTest(TestCase):
    """Test cases for the relation management command."""

    def run_command(self, *args):
        out = StringIO()
        call_command("relation", *args, stdout=out, stderr=StringIO())
        return json.loads(out.getvalue())

    def test_check_jacobi(self):
        """Test a passing relation report."""
        report = self.run_command("check", "--relation", "lambda-jacobi")
        self.assertEqual(report["schema"], "workbench/relation/v1")
        self.assertEqual(report["status"], "PASS")
        self.assertEqual(report["seeds"], [0, 1, 2, 3, 4])
        self.assertEqual(report["workers"], 1)

    def test_twisted_needs_pi(self):
        """Test that twisted-mc without an element is a usage error."""
        with self.assertRaises(CommandError) as ctx:
            call_command("relation", "check", "--relation", "twisted-mc", stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)

    def test_bad_arity(self):
        """Test that an unsupported arity is a usage error."""
        with self.assertRaises(CommandError) as ctx:
            call_command("relation", "check", "--relation", "lambda-higher", "--arity", "7", stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)

    def test_stokes(self):
        """Test the Stokes report of the three-point family."""
        report = self.run_command("stokes", "--flavor", "C", "--vertices", "3", "--strata")
        self.assertEqual(report["schema"], "workbench/stokes/v1")
        self.assertEqual(report["graphs"], 12)
        self.assertEqual(len(report["strata"]), 3)
        self.assertEqual(report["status"], "PASS")
