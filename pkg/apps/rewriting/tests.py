import json
import tempfile
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from apps.core.exceptions import PresentationError, RewriteBudgetExceeded, WorkbenchError

from .confluence import (
    CONFLUENT,
    INDETERMINATE,
    NOT_CONFLUENT,
    check_confluence,
    critical_monomials,
    normal_form,
    redexes,
    rewrite_step,
    rewrite_trace,
)
from .presentations import Generator, Presentation, preset
from .serializers import PresentationSerializer, load_presentation
from .trees import LEFTMOST_INNERMOST, RIGHTMOST_OUTERMOST, Combination, Leaf, Node, node_positions


class TreeTest(SimpleTestCase):
    """Test cases for tree monomials and their notation."""

    def setUp(self):
        self.ncg = preset("ncg")

    def test_parse_and_format(self):
        """Test that the infix notation reads and prints back unchanged."""
        for text in ("x1•((a1a2)a3)", "[[x1,x2],x3]•a1", "(x1•(x2•a1))a2", "(x2•a1)(x1•a2)", "a1(a2(x1•a3))"):
            self.assertEqual(self.ncg.format(self.ncg.parse(text)), text)

    def test_parsed_structure(self):
        """Test the tree built for a bracket acting on a product."""
        tree = self.ncg.parse("[x1,x2]•(a1a2)")
        self.assertEqual(
            tree,
            Node("action", (Node("bracket", (Leaf("x", 1), Leaf("x", 2))), Node("product", (Leaf("a", 1), Leaf("a", 2))))),
        )
        self.assertEqual(tree.weight, 3)
        self.assertEqual(self.ncg.degree(tree), -1)

    def test_parse_errors(self):
        """Test that malformed monomials are rejected."""
        for text in ("a1a2a3", "x1•a1a2", "[x1,a1]", "b1", "x1•x2", "(a1a2", "a1a1", "", "a0"):
            with self.assertRaises(PresentationError, msg=text):
                self.ncg.parse(text)

    def test_normalize(self):
        """Test that brackets are ordered by their smallest leaf with a sign."""
        tree, sign = self.ncg.normalize(self.ncg.parse("[[x3,x1],x2]"))
        self.assertEqual(self.ncg.format(tree), "[[x1,x3],x2]")
        self.assertEqual(sign, -1)
        tree, sign = self.ncg.normalize(self.ncg.parse("[x2,x1]•(a2a1)"))
        self.assertEqual(self.ncg.format(tree), "[x1,x2]•(a2a1)")
        self.assertEqual(sign, -1)

    def test_strategies(self):
        """Test the visiting order of both strategies."""
        tree = self.ncg.parse("x1•((a1a2)a3)")
        self.assertEqual(node_positions(tree, LEFTMOST_INNERMOST), [(1, 0), (1,), ()])
        self.assertEqual(node_positions(tree, RIGHTMOST_OUTERMOST), [(), (1,), (1, 0)])

    def test_combination(self):
        """Test that opposite terms cancel."""
        a, b = self.ncg.parse("a1a2"), self.ncg.parse("a2a1")
        total = Combination([(a, 1), (b, 2), (a, -1)])
        self.assertEqual(total.items(), [(b, 2)])
        self.assertFalse(Combination([(a, 1), (a, -1)]))
        self.assertEqual(self.ncg.format_terms([(a, 1), (b, -2)]), "a1a2 - 2*a2a1")


class PresentationTest(SimpleTestCase):
    """Test cases for presentations and their JSON format."""

    def test_presets(self):
        """Test the shipped presentations."""
        ncg = preset("ncg")
        self.assertEqual(ncg.colors, ("x", "a"))
        self.assertEqual([rule.name for rule in ncg.rules], ["associativity", "jacobi", "derivation", "representation"])
        self.assertEqual(ncg.generators["bracket"].degree, -1)
        self.assertEqual(len(preset("assoc").rules), 1)
        with self.assertRaises(PresentationError):
            preset("lie")

    def test_rule_checks(self):
        """Test that ill-formed rules and colors are rejected."""
        serializer = PresentationSerializer(data={
            "colors": ["a"],
            "generators": [{"name": "m", "inputs": ["a", "a"], "output": "a"}],
            "rules": [{"name": "r", "left": "a1a2", "right": [{"coefficient": "1", "tree": "a2a1"}]}],
        })
        self.assertFalse(serializer.is_valid())
        with self.assertRaises(PresentationError):
            Presentation("p", [])
        with self.assertRaises(PresentationError):
            Presentation("p", ["a", "a"])
        presentation = Presentation("p", ["a"])
        with self.assertRaises(PresentationError):
            presentation.add_generator(Generator("m", ("a", "a"), "a", notation="infix"))

    def test_load(self):
        """Test a presentation read from JSON."""
        presentation = load_presentation({
            "name": "comm",
            "colors": ["a"],
            "generators": [{"name": "m", "inputs": ["a", "a"], "output": "a", "symmetry": "symmetric"}],
            "rules": [{"name": "assoc", "left": "(a1a2)a3", "right": [{"coefficient": 1, "tree": "a1(a2a3)"}]}],
        })
        self.assertEqual(presentation.name, "comm")
        tree, sign = presentation.normalize(presentation.parse("a2a1"))
        self.assertEqual((presentation.format(tree), sign), ("a1a2", 1))
        self.assertEqual(presentation.describe()["rules"][0]["right"], "a1(a2a3)")

    def test_mismatched_rule(self):
        """Test that both sides of a rule must share leaves and degree."""
        data = {
            "colors": ["x", "a"],
            "generators": [
                {"name": "b", "inputs": ["x", "x"], "output": "x", "degree": -1, "notation": "bracket"},
                {"name": "m", "inputs": ["a", "a"], "output": "a"},
            ],
            "rules": [{"name": "r", "left": "(a1a2)a3", "right": [{"coefficient": 1, "tree": "a1a2"}]}],
        }
        self.assertFalse(PresentationSerializer(data=data).is_valid())
        data["rules"] = [{"name": "r", "left": "[[x1,x2],x3]", "right": [{"coefficient": 1, "tree": "[x1,x2]"}]}]
        self.assertFalse(PresentationSerializer(data=data).is_valid())


class RewritingTest(SimpleTestCase):
    """Test cases for rewrite steps, traces and normal forms."""

    def setUp(self):
        self.ncg = preset("ncg")

    def lines(self, text, first, strategy=LEFTMOST_INNERMOST):
        trace = rewrite_trace(self.ncg, self.ncg.parse(text), first, strategy)
        return [self.ncg.format_terms(line) for line in trace.lines]

    def test_rule_examples(self):
        """Test single steps of the associativity and representation rules."""
        step = rewrite_step(self.ncg.parse("(a1a2)a3"), self.ncg)
        self.assertEqual(step, Combination.of(self.ncg.parse("a1(a2a3)")))
        step = rewrite_step(self.ncg.parse("[x1,x2]•a1"), self.ncg)
        self.assertEqual(self.ncg.format_terms(step.items()), "x1•(x2•a1) - x2•(x1•a1)")
        self.assertIsNone(rewrite_step(self.ncg.parse("a1(a2a3)"), self.ncg))

    def test_jacobi_step(self):
        """Test that the Jacobi rule yields normalized brackets."""
        step = rewrite_step(self.ncg.parse("[[x1,x2],x3]"), self.ncg)
        self.assertEqual(self.ncg.format_terms(step.items()), "[x1,[x2,x3]] + [[x1,x3],x2]")
        self.assertIsNone(rewrite_step(self.ncg.parse("[[x1,x3],x2]"), self.ncg))

    def test_derivation_through_product(self):
        """Test the first displayed derivation of x1•((a1a2)a3), both ways."""
        self.assertEqual(
            [redex.rule.name for redex in redexes(self.ncg, self.ncg.parse("x1•((a1a2)a3)"))],
            ["associativity", "derivation"],
        )
        self.assertEqual(self.lines("x1•((a1a2)a3)", 1), [
            "(x1•(a1a2))a3 + (a1a2)(x1•a3)",
            "((x1•a1)a2)a3 + (a1(x1•a2))a3 + a1(a2(x1•a3))",
            "(x1•a1)(a2a3) + a1((x1•a2)a3) + a1(a2(x1•a3))",
        ])
        self.assertEqual(self.lines("x1•((a1a2)a3)", 0), [
            "x1•(a1(a2a3))",
            "(x1•a1)(a2a3) + a1(x1•(a2a3))",
            "(x1•a1)(a2a3) + a1((x1•a2)a3) + a1(a2(x1•a3))",
        ])

    def test_bracket_on_product(self):
        """Test the second displayed derivation of [x1,x2]•(a1a2), both ways."""
        self.assertEqual(
            [redex.rule.name for redex in redexes(self.ncg, self.ncg.parse("[x1,x2]•(a1a2)"))],
            ["derivation", "representation", "representation"],
        )
        self.assertEqual(self.lines("[x1,x2]•(a1a2)", 0), [
            "([x1,x2]•a1)a2 + a1([x1,x2]•a2)",
            "(x1•(x2•a1))a2 - (x2•(x1•a1))a2 + a1(x1•(x2•a2)) - a1(x2•(x1•a2))",
        ])
        self.assertEqual(self.lines("[x1,x2]•(a1a2)", 1), [
            "x1•(x2•(a1a2)) - x2•(x1•(a1a2))",
            "x1•((x2•a1)a2) + x1•(a1(x2•a2)) - x2•((x1•a1)a2) - x2•(a1(x1•a2))",
            "(x1•(x2•a1))a2 + (x2•a1)(x1•a2) + (x1•a1)(x2•a2) + a1(x1•(x2•a2))"
            " - (x2•(x1•a1))a2 - (x1•a1)(x2•a2) - (x2•a1)(x1•a2) - a1(x2•(x1•a2))",
        ])

    def test_normal_form(self):
        """Test normal forms of the displayed monomials."""
        result = normal_form(self.ncg.parse("x1•((a1a2)a3)"), self.ncg)
        self.assertEqual(self.ncg.format_terms(result.items()), "(x1•a1)(a2a3) + a1((x1•a2)a3) + a1(a2(x1•a3))")
        result = normal_form(self.ncg.parse("[x1,x2]•(a1a2)"), self.ncg)
        self.assertEqual(len(result), 4)
        normal = self.ncg.parse("(x1•a1)(a2a3)")
        self.assertEqual(normal_form(normal, self.ncg), Combination.of(normal))

    def test_budget(self):
        """Test that an exhausted budget is reported."""
        with self.assertRaises(RewriteBudgetExceeded):
            normal_form(self.ncg.parse("[x1,x2]•(a1a2)"), self.ncg, step_budget=2)
        with self.assertRaises(WorkbenchError):
            normal_form(self.ncg.parse("a1a2"), self.ncg, step_budget=0)


class ConfluenceTest(SimpleTestCase):
    """Test cases for critical monomials and confluence."""

    def formatted(self, presentation):
        return [presentation.format(monomial.tree) for monomial in critical_monomials(presentation)]

    def test_ncg_critical_monomials(self):
        """Test the five critical monomials of the two-colored presentation."""
        self.assertEqual(self.formatted(preset("ncg")), [
            "[[[x1,x2],x3],x4]",
            "((a1a2)a3)a4",
            "[[x1,x2],x3]•a1",
            "[x1,x2]•(a1a2)",
            "x1•((a1a2)a3)",
        ])

    def test_assoc_critical_monomials(self):
        """Test the single overlap of associativity."""
        self.assertEqual(self.formatted(preset("assoc")), ["((a1a2)a3)a4"])

    def test_ncg_confluent(self):
        """Test that every critical monomial of the two-colored presentation is confluent."""
        report = check_confluence(preset("ncg"))
        self.assertTrue(report.passed)
        self.assertEqual(report.counts[CONFLUENT], 5)
        for result in report.results:
            self.assertEqual(set(result.strategies.values()), {CONFLUENT})

    def test_one_colored_not_confluent(self):
        """Test the non-confluent overlap of the one-colored presentation."""
        ncg1 = preset("ncg1")
        self.assertIn("[x1x2,x3x4]", self.formatted(ncg1))
        report = check_confluence(ncg1)
        self.assertFalse(report.passed)
        result = report.result("[x1x2,x3x4]")
        self.assertEqual(result.status, NOT_CONFLUENT)
        self.assertEqual(report.result("((x1x2)x3)x4").status, CONFLUENT)

    def test_assoc_confluent(self):
        """Test that associativity is confluent."""
        report = check_confluence(preset("assoc"), strategies=(RIGHTMOST_OUTERMOST,))
        self.assertTrue(report.passed)
        self.assertEqual(len(report.results), 1)

    def test_strategy_independence(self):
        """Test that both strategies reach the same normal forms."""
        report = check_confluence(preset("ncg"))
        for result in report.results:
            self.assertEqual(
                result.normal_forms(LEFTMOST_INNERMOST)[0], result.normal_forms(RIGHTMOST_OUTERMOST)[0]
            )

    def test_indeterminate(self):
        """Test that a tiny budget leaves the verdict open."""
        report = check_confluence(preset("ncg"), budget=1)
        self.assertFalse(report.passed)
        self.assertEqual(report.result("x1•((a1a2)a3)").status, INDETERMINATE)


class KoszulCommandTest(SimpleTestCase):
    """Test cases for the koszul management command."""

    def run_command(self, *args):
        out = StringIO()
        call_command("koszul", *args, stdout=out, stderr=StringIO())
        return out.getvalue()

    def test_check_ncg(self):
        """Test the confluence report of the two-colored presentation."""
        report = json.loads(self.run_command("check", "--preset", "ncg"))
        self.assertEqual(report["schema"], "workbench/koszul/v1")
        self.assertEqual(report["status"], "PASS")
        self.assertEqual(report["critical_monomials"], 5)
        self.assertEqual(report["counts"]["CONFLUENT"], 5)
        self.assertEqual(report["workers"], 1)

    def test_check_ncg1_fails(self):
        """Test that a non-confluent presentation exits with status 1."""
        with self.assertRaises(CommandError) as ctx:
            call_command("koszul", "check", "--preset", "ncg1", stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 1)

    def test_check_csv(self):
        """Test the CSV summary."""
        lines = self.run_command("check", "--preset", "assoc", "--format", "csv").splitlines()
        self.assertEqual(lines[0], "monomial,status,redexes,normal_form")
        self.assertEqual(lines[1], "((a1a2)a3)a4,CONFLUENT,2,a1(a2(a3a4))")

    def test_rewrite(self):
        """Test the trace of one monomial."""
        report = json.loads(self.run_command(
            "rewrite", "--preset", "ncg", "--monomial", "x1•((a1a2)a3)", "--redex", "1",
        ))
        self.assertEqual(report["lines"][0], "(x1•(a1a2))a3 + (a1a2)(x1•a3)")
        self.assertEqual(report["first"]["rule"], "derivation")
        self.assertEqual(len(report["redexes"]), 2)

    def test_presentation_file(self):
        """Test a presentation file, and a malformed one."""
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / "assoc.json"
            data = json.loads((Path(__file__).resolve().parent / "presets" / "assoc.json").read_text(encoding="utf-8"))
            path.write_text(json.dumps(data), encoding="utf-8")
            report = json.loads(self.run_command("check", "--presentation", str(path)))
            self.assertEqual(report["presentation"]["name"], "assoc")
            data["rules"][0]["left"] = "a1a2a3"
            path.write_text(json.dumps(data), encoding="utf-8")
            with self.assertRaises(CommandError) as ctx:
                call_command("koszul", "check", "--presentation", str(path), stdout=StringIO())
            self.assertEqual(ctx.exception.returncode, 2)

    def test_bad_monomial(self):
        """Test that an unreadable monomial is a usage error."""
        with self.assertRaises(CommandError) as ctx:
            call_command("koszul", "rewrite", "--preset", "ncg", "--monomial", "x1•", stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)
