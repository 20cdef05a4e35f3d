import json
import tempfile
from fractions import Fraction
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase
from rest_framework import serializers

from .exceptions import PresentationError, RewriteBudgetExceeded, WorkbenchError
from .reports import render_csv, render_report, schema_name, to_jsonable, write_report
from .serializers import FractionField


class CoefficientSerializer(serializers.Serializer):
    value = FractionField()


class ReportTest(SimpleTestCase):
    """Test cases for report rendering."""

    def test_schema_name(self):
        """Test the schema naming scheme."""
        self.assertEqual(schema_name("koszul"), "workbench/koszul/v1")

    def test_to_jsonable(self):
        """Test that exact rationals survive as strings and integers."""
        value = {"a": Fraction(1, 24), "b": (Fraction(4, 2), [Fraction(-1, 3)]), 3: "x"}
        self.assertEqual(to_jsonable(value), {"a": "1/24", "b": [2, ["-1/3"]], "3": "x"})

    def test_render_report(self):
        """Test that the schema comes first and non-ASCII text is kept."""
        data = render_report("koszul", {"monomial": "x1•a1", "value": Fraction(1, 2)})
        self.assertTrue(data.endswith(b"\n"))
        text = data.decode("utf-8")
        self.assertTrue(text.startswith('{"schema":"workbench/koszul/v1"'))
        self.assertIn("x1•a1", text)
        self.assertEqual(json.loads(text)["value"], "1/2")

    def test_render_csv(self):
        """Test the CSV layout."""
        data = render_csv([{"a": Fraction(1, 2), "b": 3, "c": "ignored"}], ["a", "b"])
        self.assertEqual(data.decode("utf-8"), "a,b\n1/2,3\n")

    def test_write_report(self):
        """Test that reports are written below missing directories."""
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / "nested" / "report.json"
            write_report(b"{}\n", str(path))
            self.assertEqual(path.read_bytes(), b"{}\n")
        self.assertEqual(write_report(b"x"), b"x")


class FractionFieldTest(SimpleTestCase):
    """Test cases for the exact rational serializer field."""

    def test_accepts_rationals(self):
        """Test integers and rational strings."""
        for raw, expected in ((3, Fraction(3)), ("1/2", Fraction(1, 2)), ("-2/4", Fraction(-1, 2))):
            serializer = CoefficientSerializer(data={"value": raw})
            self.assertTrue(serializer.is_valid(), serializer.errors)
            self.assertEqual(serializer.validated_data["value"], expected)

    def test_rejects_other_values(self):
        """Test that booleans, floats and garbage are rejected."""
        for raw in (True, 0.5, "half", "1/0", None):
            self.assertFalse(CoefficientSerializer(data={"value": raw}).is_valid(), raw)

    def test_representation(self):
        """Test that integral values render as integers."""
        field = FractionField()
        self.assertEqual(field.to_representation(Fraction(4, 2)), 2)
        self.assertEqual(field.to_representation(Fraction(1, 3)), "1/3")


class ExceptionTest(SimpleTestCase):
    """Test cases for the exception hierarchy."""

    def test_hierarchy(self):
        """Test that domain errors share the workbench base class."""
        self.assertTrue(issubclass(PresentationError, WorkbenchError))
        self.assertTrue(issubclass(PresentationError, ValueError))
        error = RewriteBudgetExceeded(7)
        self.assertIsInstance(error, WorkbenchError)
        self.assertEqual(error.budget, 7)


class WorkbenchCommandTest(TestCase):
    """Test cases for the shared command plumbing."""

    def test_output_file(self):
        """Test that --output writes the same bytes as stdout."""
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / "koszul.json"
            out = StringIO()
            call_command("koszul", "check", "--preset", "assoc", "--output", str(path), stdout=out, stderr=StringIO())
            self.assertEqual(path.read_text(encoding="utf-8"), out.getvalue())

    def test_workers_recorded(self):
        """Test that the worker count lands in the report."""
        out = StringIO()
        call_command("koszul", "check", "--preset", "assoc", "--workers", "2", stdout=out, stderr=StringIO())
        self.assertEqual(json.loads(out.getvalue())["workers"], 2)

    def test_invalid_workers(self):
        """Test that a non-positive worker count is a usage error."""
        with self.assertRaises(CommandError) as ctx:
            call_command("koszul", "check", "--preset", "assoc", "--workers", "0", stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)

    def test_missing_file(self):
        """Test that an unreadable input file is a usage error."""
        with self.assertRaises(CommandError) as ctx:
            call_command("koszul", "check", "--presentation", "/nonexistent/p.json", stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)

    def test_workbench_info(self):
        """Test the configuration overview."""
        out = StringIO()
        call_command("workbench_info", "--verbose", stdout=out)
        self.assertIn("WORKBENCH_REWRITE_BUDGET", out.getvalue())
        self.assertIn("apps.rewriting", out.getvalue())
