import json
import tempfile
from fractions import Fraction
from io import StringIO
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase

from apps.core.exceptions import AlgebraError, LieAlgebraError
from apps.hochschild.cochains import AInfinity
from apps.polyvector.algebra import Space, parse_polyvector, schouten
from apps.polyvector.sampling import random_polyvector
from apps.weights.sources import KnownWeights, MonteCarloWeights

from .lie import SHIPPED, LieAlgebra, lie_to_mc, shipped
from .serializers import LieAlgebraSerializer
from .star import (
    AssociativityReport,
    AssociativityRow,
    exotic_correction,
    exotic_display,
    hkr,
    monomial_basis,
    star_product,
)


class LieAlgebraTest(SimpleTestCase):
    """Test cases for Lie algebras and their Poisson structures."""

    def test_shipped_algebras(self):
        """Test that every shipped algebra gives a Maurer-Cartan element."""
        for name in SHIPPED:
            pi = lie_to_mc(shipped(name))
            self.assertFalse(schouten(pi, pi), name)

    def test_abelian(self):
        """Test that the abelian algebra has no Poisson structure."""
        self.assertFalse(lie_to_mc(shipped("abelian")))
        self.assertTrue(shipped("abelian").is_abelian)

    def test_solvable(self):
        """Test the Poisson structure of the two-dimensional solvable algebra."""
        algebra = shipped("solvable2")
        pi = lie_to_mc(algebra)
        self.assertEqual(pi, parse_polyvector("x2*psi1*psi2", pi.space))
        self.assertEqual(algebra.bracket([1, 0], [0, 1]), [0, 1])
        self.assertEqual(algebra.bracket([0, 1], [1, 0]), [0, -1])

    def test_sl2(self):
        """Test the structure constants of sl2."""
        algebra = shipped("sl2")
        self.assertEqual(algebra.constant(0, 1, 1), 2)
        self.assertEqual(algebra.constant(2, 0, 2), 2)
        self.assertEqual(algebra.bracket([0, 1, 0], [0, 0, 1]), [1, 0, 0])

    def test_sl2_poisson(self):
        """Test that each constant c^k_ij with i < j becomes c^k_ij x_k psi_i psi_j."""
        pi = lie_to_mc(shipped("sl2"))
        expected = parse_polyvector("2*x2*psi1*psi2 - 2*x3*psi1*psi3 + x1*psi2*psi3", pi.space)
        self.assertEqual(pi, expected)

    def test_jacobi_failure(self):
        """Test that brackets violating Jacobi are rejected."""
        with self.assertRaises(LieAlgebraError):
            LieAlgebra.from_brackets("bad", 3, {(1, 2): {1: 1}, (2, 3): {2: 1}})

    def test_antisymmetry(self):
        """Test that non-antisymmetric arrays and diagonal brackets are rejected."""
        with self.assertRaises(LieAlgebraError):
            LieAlgebra.from_array("bad", [[[0, 0], [0, 1]], [[0, 1], [0, 0]]])
        with self.assertRaises(LieAlgebraError):
            LieAlgebra.from_brackets("bad", 2, {(1, 1): {2: 1}})
        with self.assertRaises(LieAlgebraError):
            shipped("e8")

    def test_array_form(self):
        """Test that the array form agrees with the bracket form."""
        algebra = LieAlgebra.from_array("solvable2", [[[0, 0], [0, 1]], [[0, -1], [0, 0]]])
        self.assertEqual(algebra, shipped("solvable2"))

    def test_serializer(self):
        """Test the JSON format of Lie algebras."""
        serializer = LieAlgebraSerializer(data={
            "name": "h3", "dimension": 3, "brackets": [{"i": 1, "j": 2, "k": 3, "c": "1"}],
        })
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.validated_data["algebra"].constants, shipped("heisenberg").constants)
        self.assertEqual(
            LieAlgebraSerializer(shipped("solvable2")).data["brackets"],
            [{"i": 1, "j": 2, "k": 2, "c": Fraction(1)}],
        )
        self.assertFalse(LieAlgebraSerializer(data={"name": "empty"}).is_valid())


class HKRTest(SimpleTestCase):
    """Test cases for the HKR map."""

    def setUp(self):
        self.space = Space(2, truncation=6)

    def test_functions(self):
        """Test that a function is a constant cochain."""
        f = parse_polyvector("x1^2 + x2", self.space)
        self.assertEqual(hkr(f)(), f)

    def test_vector_field(self):
        """Test that psi_1 is the derivative along x1."""
        cochain = hkr(self.space.psi(1))
        self.assertEqual(cochain(parse_polyvector("x1^2*x2", self.space)), parse_polyvector("2*x1*x2", self.space))

    def test_poisson_bracket(self):
        """Test that the antisymmetrization of hkr(pi) is the Poisson bracket up to the bar sign."""
        pi = lie_to_mc(shipped("solvable2"), self.space)
        cochain = hkr(pi)
        x1, x2 = self.space.x(1), self.space.x(2)
        self.assertEqual(cochain(x1, x2), -cochain(x2, x1))
        self.assertIn(cochain(x1, x2) - cochain(x2, x1), (x2, -x2))

    def test_cocycle(self):
        """Test that d_H of hkr vanishes on functions."""
        rng = np.random.default_rng(17)
        m = AInfinity.associative(self.space)
        for gamma, arity in ((self.space.psi(2), 1), (parse_polyvector("x1*psi1*psi2", self.space), 2)):
            d = m.differential(hkr(gamma))
            for _ in range(3):
                functions = [random_polyvector(self.space, rng, 0, max_polynomial_degree=2) for _ in range(arity + 1)]
                self.assertFalse(d(*functions))

    def test_mixed_degrees(self):
        """Test that mixed psi-degrees are rejected."""
        with self.assertRaises(AlgebraError):
            hkr(parse_polyvector("x1 + psi1", self.space))


class StarProductTest(TestCase):
    """Test cases for the star product."""

    def test_abelian(self):
        """Test that the abelian star product is the commutative product."""
        star = star_product(shipped("abelian"), 2, KnownWeights(), max_degree=2)
        f, g = star.space.x(1), star.space.x(2) * star.space.x(1)
        self.assertEqual(star(f, g), [f * g, star.space.zero(), star.space.zero()])
        report = star.associativity()
        self.assertTrue(report.passed)
        self.assertEqual(report.defect_norm, 0.0)

    def test_first_order(self):
        """Test the half Poisson bracket at first order."""
        star = star_product(shipped("solvable2"), 1, KnownWeights(), max_degree=2)
        x1, x2 = star.space.x(1), star.space.x(2)
        self.assertEqual(star.bidifferential(1, x1, x2), x2.scale(Fraction(1, 2)))
        self.assertEqual(star.poisson_bracket(x1, x2), x2)
        self.assertEqual([row["weight"] for row in star.weights()], [Fraction(1, 2)])

    def test_first_order_associativity(self):
        """Test exact associativity modulo the second order."""
        star = star_product(shipped("sl2"), 1, KnownWeights(), max_degree=2)
        report = star.associativity(monomial_basis(star.space, 1))
        self.assertTrue(report.passed)
        self.assertEqual(report.defect_norm, 0.0)
        self.assertEqual(report.stderr_norm, 0.0)

    def test_degree_filtration(self):
        """Test that the h^p term lowers the polynomial degree by p."""
        star = star_product(shipped("solvable2"), 1, KnownWeights(), max_degree=2)
        basis = monomial_basis(star.space, 2)
        self.assertTrue(all(star.lowers_degree(f, g) for f in basis for g in basis))

    def test_second_order_associativity(self):
        """Test associativity at second order within the propagated error."""
        source = MonteCarloWeights(samples=4000, seed=12)
        star = star_product(shipped("solvable2"), 2, source, max_degree=2)
        report = star.associativity()
        self.assertGreater(report.stderr_norm, 0.0)
        self.assertTrue(report.passed, report.describe())

    def test_order_bound(self):
        """Test that orders above two are rejected."""
        with self.assertRaises(AlgebraError):
            star_product(shipped("solvable2"), 3, KnownWeights())


class AssociativityReportTest(SimpleTestCase):
    """Test cases for the associativity verdict."""

    def row(self, defect, stderr, power=1):
        return AssociativityRow("x1", "x2", "x1", power, defect, stderr)

    def test_every_row_is_judged_by_its_own_error(self):
        """Test that an exact row with a defect fails next to a noisy row."""
        report = AssociativityReport(2, [self.row(0.5, 0.0), self.row(0.0, 0.1, power=2)])
        self.assertFalse(report.rows[0].passes())
        self.assertTrue(report.rows[1].passes())
        self.assertLessEqual(report.defect_norm, 10 * report.stderr_norm)
        self.assertFalse(report.passed)
        self.assertEqual(report.describe()["status"], "FAIL")

    def test_noisy_rows_within_error(self):
        """Test that defects within their own propagated error pass."""
        report = AssociativityReport(2, [self.row(0.0, 0.0), self.row(0.3, 0.1, power=2)])
        self.assertTrue(report.passed)
        self.assertEqual(report.describe()["status"], "PASS")
        self.assertTrue(AssociativityReport(1).passed)


class ExoticCorrectionTest(SimpleTestCase):
    """Test cases for the first exotic correction."""

    def test_matches_eight_terms(self):
        """Test V_{1,3}(pi) against the eight-term formula."""
        for name in ("solvable2", "sl2", "heisenberg"):
            operator = exotic_correction(shipped(name))
            pi = lie_to_mc(shipped(name), operator.space)
            rng = np.random.default_rng(4)
            for _ in range(3):
                inputs = [
                    random_polyvector(operator.space, rng, int(rng.integers(0, 3)), terms=2) for _ in range(3)
                ]
                self.assertEqual(operator(*inputs), exotic_display(pi, *inputs), name)

    def test_abelian(self):
        """Test that the abelian correction vanishes."""
        operator = exotic_correction(shipped("abelian"))
        space = operator.space
        self.assertFalse(operator(space.psi(1), space.x(1) * space.psi(2), space.x(2)))

    def test_degree(self):
        """Test the degree and arity of the correction."""
        operator = exotic_correction(shipped("sl2"))
        self.assertEqual(operator.degree, -3)
        self.assertEqual(operator.arity, 3)


class DufloCommandTest(TestCase):
    """Test cases for the duflo management command."""

    def run_command(self, *args):
        out = StringIO()
        call_command("duflo", *args, stdout=out, stderr=StringIO())
        return out.getvalue()

    def test_star_report(self):
        """Test the first-order star report."""
        report = json.loads(self.run_command("star", "--lie", "solvable2", "--order", "1", "--max-degree", "2"))
        self.assertEqual(report["schema"], "workbench/duflo-star/v1")
        self.assertEqual(report["status"], "PASS")
        self.assertEqual(report["brackets"], [{"i": 1, "j": 2, "bracket": "x2", "ok": True}])
        self.assertTrue(report["filtration"])
        self.assertEqual(len(report["rows"]), 5 * 5 * 2)

    def test_star_csv(self):
        """Test the CSV coefficient table."""
        lines = self.run_command(
            "star", "--lie", "abelian", "--order", "0", "--max-degree", "1", "--format", "csv"
        ).splitlines()
        self.assertEqual(lines[0], "left,right,power,value")
        self.assertEqual(lines[1], "x1,x1,0,x1^2")
        self.assertEqual(len(lines), 5)

    def test_exotic(self):
        """Test the exotic comparison report."""
        report = json.loads(self.run_command("exotic", "--lie", "sl2", "--seeds", "1", "2"))
        self.assertEqual(report["status"], "PASS")
        self.assertEqual(report["degree"], -3)
        self.assertEqual(report["seeds"], [1, 2])

    def test_lie_file(self):
        """Test a Lie algebra read from a file, and a malformed one."""
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / "lie.json"
            path.write_text(json.dumps({"dimension": 2, "brackets": [{"i": 1, "j": 2, "k": 2, "c": 1}]}))
            report = json.loads(self.run_command("exotic", "--lie-file", str(path), "--seeds", "0"))
            self.assertEqual(report["algebra"]["name"], "custom")
            path.write_text(json.dumps({"constants": [[[0, 0], [0, 1]], [[0, 1], [0, 0]]]}))
            with self.assertRaises(CommandError) as ctx:
                call_command("duflo", "exotic", "--lie-file", str(path), stdout=StringIO())
            self.assertEqual(ctx.exception.returncode, 2)

    def test_unknown_algebra(self):
        """Test that an unknown shipped name is a usage error."""
        with self.assertRaises(CommandError) as ctx:
            call_command("duflo", "star", "--lie", "e8", stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)
