"""
Quadratic identities from the boundary of the fundamental chains.

For a graph with one edge less than the dimension of its stratum, the form
is exact and its integral over the boundary vanishes. Every boundary stratum
contributes the product of the weights of the collapsed subgraph and of the
quotient, with the orientation sign of the stratum.
"""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

from django.conf import settings

from apps.core.exceptions import DegreeMismatchError, SliceError
from apps.graphs.cooperad import cocompose
from apps.graphs.structures import enumerate_graphs

from .strata import boundary_strata

logger = logging.getLogger(__name__)


@dataclass
class StokesRow:
    graph: object
    terms: list = field(default_factory=list)
    exact: Fraction | None = Fraction(0)
    value: float = 0.0
    variance: float = 0.0

    @property
    def stderr(self):
        return math.sqrt(self.variance)

    def add(self, coefficient, inner, outer):
        product = inner.value * outer.value
        self.value += coefficient * product
        self.variance += (outer.value * inner.stderr) ** 2 + (inner.value * outer.stderr) ** 2
        if self.exact is not None and inner.exact is not None and outer.exact is not None:
            self.exact += coefficient * inner.exact * outer.exact
        else:
            self.exact = None

    @property
    def residual(self):
        return abs(float(self.exact)) if self.exact is not None else abs(self.value)

    def passes(self, tolerance):
        return self.residual <= max(tolerance, 3 * self.stderr)


@dataclass
class StokesReport:
    vertices: object
    rows: list
    tolerance: float

    @property
    def passed(self):
        return all(row.passes(self.tolerance) for row in self.rows)

    @property
    def residual_norm(self):
        return max((row.residual for row in self.rows), default=0.0)

    def describe(self):
        return {
            "vertices": self.vertices.describe(),
            "edges": self.vertices.dimension - 1,
            "graphs": len(self.rows),
            "tolerance": self.tolerance,
            "residual_norm": self.residual_norm,
            "status": "PASS" if self.passed else "FAIL",
            "rows": [
                {
                    "graph": str(row.graph),
                    "terms": row.terms,
                    "exact": None if row.exact is None else str(row.exact),
                    "value": row.value,
                    "stderr": row.stderr,
                    "status": "PASS" if row.passes(self.tolerance) else "FAIL",
                }
                for row in self.rows
            ],
        }


def stokes_row(g, weight_source, signs):
    """Assemble the boundary sum of one graph; ``signs`` maps splittings to stratum signs."""
    row = StokesRow(g)
    for term in cocompose(g):
        splitting = term.splitting
        inner = term.right
        if inner.edge_count != splitting.inner.dimension:
            continue
        for outer, coefficient in term.left.items():
            if outer.edge_count != splitting.outer.dimension:
                continue
            sign = signs[splitting]
            inner_estimate = weight_source.estimate(inner)
            outer_estimate = weight_source.estimate(outer)
            row.add(sign * coefficient, inner_estimate, outer_estimate)
            row.terms.append({
                "kind": splitting.kind,
                "inner": str(inner),
                "outer": str(outer),
                "sign": sign * coefficient,
                "inner_weight": inner_estimate.exact if inner_estimate.exact is not None else inner_estimate.value,
                "outer_weight": outer_estimate.exact if outer_estimate.exact is not None else outer_estimate.value,
            })
    return row


def stokes_check(vertices, weight_source, tolerance=None, graphs=None, filter=None):
    """
    Check the boundary identity of every graph in the family of ``vertices``
    with dimension - 1 edges, or of the given ``graphs``.
    """
    if not vertices.is_defined() or vertices.dimension < 1:
        raise SliceError(f"{vertices} has no boundary to integrate over")
    tolerance = settings.WORKBENCH_TOLERANCE if tolerance is None else tolerance
    if graphs is None:
        graphs = enumerate_graphs(vertices, vertices.dimension - 1, filter)
    for g in graphs:
        if g.vertices != vertices or g.edge_count != vertices.dimension - 1:
            raise DegreeMismatchError(
                f"{g} does not have {vertices.dimension - 1} edges on {vertices}"
            )
    signs = {term.splitting: term.sign for term in boundary_strata(vertices)}
    logger.info("Stokes check on %s: %d graphs, %d strata", vertices, len(graphs), len(signs))
    rows = [stokes_row(g, weight_source, signs) for g in graphs]
    report = StokesReport(vertices, rows, tolerance)
    logger.info("Stokes check on %s: residual %.3g", vertices, report.residual_norm)
    return report
