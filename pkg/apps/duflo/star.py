"""
Star products of linear Poisson structures, the HKR map and the first
exotic correction of the wedge product.

With pi the Poisson structure of a Lie algebra,

    f * g = fg + sum_{p >= 1} h^p / p! U_{p,2}(pi, .., pi; f, g)

where U_{p,2} sums the graphs on p free and two boundary vertices in which
every free vertex emits exactly two edges. Weights of order one are exact;
higher orders are numerical, so associativity is judged against the error
propagated from the weight estimates.
"""
import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from apps.core.exceptions import AlgebraError
from apps.graphs.structures import Flavor, VertexSet, enumerate_graphs, out_degree
from apps.hochschild.cochains import Cochain, constant_cochain, from_multilinear
from apps.homotopy.components import StructureComponents
from apps.polyvector.algebra import PolyVector, Space, Tensor, format_monomial, project_to_O
from apps.polyvector.representation import MultiOperator, apply_graph
from apps.polyvector.sampling import monomial_keys
from apps.weights.sources import KnownWeights

from .lie import lie_to_mc

logger = logging.getLogger(__name__)

MAX_ORDER = 2
DEFECT_FACTOR = 10


def hkr(gamma, weight_source=None):
    """
    The multiderivation cochain of a polyvector of one psi-degree n, as the
    collinear star component Z_{0,1,n} with gamma in the collinear slot.
    """
    space = gamma.space
    parts = gamma.psi_degree_parts()
    if len(parts) > 1:
        raise AlgebraError("hkr takes a polyvector of a single psi-degree")
    if not gamma:
        return Cochain(space, -1, name="0")
    (n,) = parts
    if n == 0:
        return constant_cochain(gamma, name=str(gamma))
    components = StructureComponents(space, weight_source or KnownWeights())
    operator = components.Z(0, 1, n).bind(gamma)
    return from_multilinear(operator, n, 0, space, name=f"hkr({gamma})")


def monomial_basis(space, max_degree):
    """Nonconstant psi-free monomials of polynomial degree at most ``max_degree``."""
    return [
        PolyVector(space, {key: 1})
        for key in monomial_keys(space, 0, max_degree)
        if space.polynomial_degree(key)
    ]


def format_coefficients(value):
    """Text of a polyvector whose coefficients may be floats in disguise."""
    if all(c.denominator <= 10**6 for c in value.terms.values()):
        return str(value)
    pieces = []
    for key, c in value.items():
        monomial = format_monomial(value.space, key)
        pieces.append(f"{float(c):+.6g}*{monomial}" if monomial else f"{float(c):+.6g}")
    return " ".join(pieces)


@dataclass
class StarTerm:
    graph: object
    estimate: object

    @property
    def weight(self):
        return self.estimate.exact if self.estimate.exact is not None else Fraction(self.estimate.value)

    @property
    def stderr(self):
        return self.estimate.stderr


@dataclass
class AssociativityRow:
    left: str
    middle: str
    right: str
    power: int
    defect: float
    stderr: float

    def passes(self):
        return self.defect <= max(DEFECT_FACTOR * self.stderr, 1e-12)


@dataclass
class AssociativityReport:
    order: int
    rows: list = field(default_factory=list)

    @property
    def defect_norm(self):
        return max((row.defect for row in self.rows), default=0.0)

    @property
    def stderr_norm(self):
        return max((row.stderr for row in self.rows), default=0.0)

    @property
    def passed(self):
        return all(row.passes() for row in self.rows)

    def describe(self):
        worst = {}
        for row in self.rows:
            if row.power not in worst or row.defect > worst[row.power].defect:
                worst[row.power] = row
        return {
            "order": self.order,
            "triples": len(self.rows) // max(self.order, 1),
            "defect_norm": self.defect_norm,
            "stderr_norm": self.stderr_norm,
            "factor": DEFECT_FACTOR,
            "status": "PASS" if self.passed else "FAIL",
            "worst": [
                {
                    "power": power,
                    "inputs": [row.left, row.middle, row.right],
                    "defect": row.defect,
                    "stderr": row.stderr,
                }
                for power, row in sorted(worst.items())
            ],
        }


class StarProduct:
    """Bidifferential operators of the star product per power of h, up to ``order``."""

    def __init__(self, algebra, order, weight_source, max_degree=3):
        if not 0 <= order <= MAX_ORDER:
            raise AlgebraError(f"star products are assembled up to order {MAX_ORDER}")
        self.algebra = algebra
        self.order = order
        self.max_degree = max_degree
        # room for the products of three inputs and the factors of pi
        self.space = Space(algebra.dimension, truncation=3 * max_degree + order)
        self.pi = lie_to_mc(algebra, self.space)
        self.terms = {}
        for power in range(1, order + 1):
            vertices = VertexSet.standard(Flavor.CF_H, power, 0, 2)
            found = []
            if self.pi:
                for g in enumerate_graphs(vertices, vertices.dimension, out_degree("free", 2)):
                    estimate = weight_source.estimate(g)
                    if estimate.value or estimate.stderr or estimate.exact:
                        found.append(StarTerm(g, estimate))
            self.terms[power] = found
            logger.info("Star product of %s at order %d: %d graphs", algebra.name, power, len(found))
        self._memo = {}

    def graph_value(self, power, index, f, g):
        """One graph of order ``power`` with unit weight, including 1/p!."""
        key = (power, index, tuple(sorted(f.terms.items())), tuple(sorted(g.terms.items())))
        if key not in self._memo:
            term = self.terms[power][index]
            tensor = Tensor.of([self.pi] * power + [f, g])
            value = apply_graph(term.graph, tensor)
            self._memo[key] = value.scale(Fraction(1, math.factorial(power)))
        return self._memo[key]

    def bidifferential(self, power, f, g):
        if power == 0:
            return project_to_O(f * g)
        total = self.space.zero()
        for index, term in enumerate(self.terms.get(power, [])):
            total = total + self.graph_value(power, index, f, g).scale(term.weight)
        return total

    def __call__(self, f, g):
        """Coefficients of h^0 .. h^order in f * g."""
        return [self.bidifferential(power, f, g) for power in range(self.order + 1)]

    def operator(self, power):
        def evaluate(inputs):
            return self.bidifferential(power, *inputs)

        return MultiOperator(self.space, ("O", "O"), evaluate, 0, f"B_{power}")

    def poisson_bracket(self, f, g):
        """Antisymmetrization of the first-order term."""
        return self.bidifferential(1, f, g) - self.bidifferential(1, g, f)

    def lowers_degree(self, f, g):
        """Every term of h^p in f * g has polynomial degree deg f + deg g - p."""
        expected = self.space.polynomial_degree(next(iter(f.terms))) + self.space.polynomial_degree(next(iter(g.terms)))
        for power, value in enumerate(self(f, g)):
            if any(self.space.polynomial_degree(key) != expected - power for key in value.terms):
                return False
        return True

    def defect(self, power, f, g, h):
        """
        Associativity defect at h^power and its propagated standard error,
        both per monomial of the result.

        The top-order weights enter linearly; products of lower orders use
        their weights as given.
        """
        value = self.space.zero()
        for i in range(1, power):
            j = power - i
            value = value + self.bidifferential(i, self.bidifferential(j, f, g), h)
            value = value - self.bidifferential(i, f, self.bidifferential(j, g, h))
        variance = {}
        fg, gh = f * g, g * h
        for index, term in enumerate(self.terms.get(power, [])):
            linear = (
                self.graph_value(power, index, fg, h)
                - self.graph_value(power, index, f, gh)
                + self.graph_value(power, index, f, g) * h
                - f * self.graph_value(power, index, g, h)
            )
            value = value + linear.scale(term.weight)
            if term.stderr:
                for key, coefficient in linear.terms.items():
                    variance[key] = variance.get(key, 0.0) + (term.stderr * float(coefficient)) ** 2
        stderr = {key: math.sqrt(v) for key, v in variance.items()}
        return value, stderr

    def associativity(self, monomials=None):
        """Defects on every ordered triple of basis monomials, at every power up to the order."""
        monomials = monomial_basis(self.space, self.max_degree) if monomials is None else monomials
        report = AssociativityReport(self.order)
        for f, g, h in itertools.product(monomials, repeat=3):
            for power in range(1, self.order + 1):
                value, stderr = self.defect(power, f, g, h)
                defect = np.array([abs(float(c)) for c in value.terms.values()] or [0.0])
                report.rows.append(AssociativityRow(
                    str(f), str(g), str(h), power, float(defect.max()), max(stderr.values(), default=0.0),
                ))
        logger.info(
            "Associativity of the star product of %s: defect %.3g, propagated stderr %.3g",
            self.algebra.name, report.defect_norm, report.stderr_norm,
        )
        return report

    def table(self, monomials=None):
        """Rows of coefficient polyvectors for every ordered pair of basis monomials."""
        monomials = monomial_basis(self.space, self.max_degree) if monomials is None else monomials
        rows = []
        for f, g in itertools.product(monomials, repeat=2):
            for power, value in enumerate(self(f, g)):
                rows.append({
                    "left": str(f),
                    "right": str(g),
                    "power": power,
                    "value": format_coefficients(value),
                })
        return rows

    def weights(self):
        return [
            {
                "power": power,
                "graph": str(term.graph),
                "weight": term.estimate.exact if term.estimate.exact is not None else term.estimate.value,
                "stderr": term.stderr,
            }
            for power, terms in sorted(self.terms.items())
            for term in terms
        ]


def star_product(algebra, order, weight_source, max_degree=3):
    return StarProduct(algebra, order, weight_source, max_degree)


def exotic_correction(algebra, space=None):
    """V_{1,3}(pi; -, -, -) for the Poisson structure of ``algebra``."""
    pi = lie_to_mc(algebra, space)
    components = StructureComponents(pi.space, KnownWeights())
    return components.V(1, 3).bind(pi)


def exotic_display(pi, a, b, c):
    """
    The eight-term formula: 1/24 times the sum over the directions of the
    edges between pi and each input, applied input by input.
    """
    total = pi.space.zero()
    for directions in itertools.product((True, False), repeat=3):
        tensor = Tensor.of([pi, a, b, c])
        for slot, outgoing in enumerate(directions, start=1):
            tensor = tensor.tau(0, slot) if outgoing else tensor.tau(slot, 0)
        if tensor:
            total = total + tensor.multiply()
    return total.scale(Fraction(1, 24))
