"""
Deterministic JSON/CSV reports written by the management commands.
"""
import csv
import io
import logging
from fractions import Fraction
from pathlib import Path

from rest_framework.renderers import JSONRenderer

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


def schema_name(kind):
    return f"workbench/{kind}/v{SCHEMA_VERSION}"


def to_jsonable(value):
    """
    Convert exact rationals and tuples into JSON-friendly values.

    Fractions become strings such as "1/24" (integral values stay integers)
    so that exact results survive the round trip unchanged.
    """
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else str(value)
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    return value


class ReportRenderer(JSONRenderer):
    compact = True
    ensure_ascii = False


def render_report(kind, payload):
    """Render a report as bytes; the schema field always comes first."""
    document = {"schema": schema_name(kind)}
    document.update(to_jsonable(payload))
    return ReportRenderer().render(document) + b"\n"


def render_csv(rows, columns):
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({column: to_jsonable(row.get(column)) for column in columns})
    return buffer.getvalue().encode("utf-8")


def write_report(data, output=None):
    """Write rendered report bytes to a file when a path is given."""
    if output:
        path = Path(output)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
        logger.info("Report written to %s", path)
    return data
