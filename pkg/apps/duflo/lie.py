"""
Finite-dimensional Lie algebras given by structure constants, and their
linear Poisson structures on the dual.

The bracket [e_i, e_j] = sum_k c^k_ij e_k becomes the polyvector

    pi = sum_{i<j} c^k_ij x^k psi_i psi_j

whose Schouten square vanishes exactly when the Jacobi identity holds.
"""
import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction

from apps.core.exceptions import LieAlgebraError, NotMaurerCartanError
from apps.polyvector.algebra import PolyVector, Space, schouten

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LieAlgebra:
    """Structure constants keyed by 0-based (i, j, k) with i < j."""

    name: str
    dimension: int
    constants: tuple

    @classmethod
    def from_brackets(cls, name, dimension, brackets):
        """``brackets`` maps (i, j) with 1-based indices to {k: coefficient}."""
        if dimension < 1:
            raise LieAlgebraError("dimension must be positive")
        table = {}
        for (i, j), values in brackets.items():
            if not (1 <= i <= dimension and 1 <= j <= dimension):
                raise LieAlgebraError(f"bracket [e{i}, e{j}] outside dimension {dimension}")
            for k, value in values.items():
                if not 1 <= k <= dimension:
                    raise LieAlgebraError(f"basis vector e{k} outside dimension {dimension}")
                value = Fraction(value)
                if i == j:
                    if value:
                        raise LieAlgebraError(f"[e{i}, e{i}] must vanish")
                    continue
                key = (min(i, j) - 1, max(i, j) - 1, k - 1)
                signed = value if i < j else -value
                if key in table and table[key] != signed:
                    raise LieAlgebraError(f"structure constants are not antisymmetric at [e{i}, e{j}]")
                table[key] = signed
        algebra = cls(name, dimension, tuple(sorted((key, value) for key, value in table.items() if value)))
        algebra.check_jacobi()
        return algebra

    @classmethod
    def from_array(cls, name, constants):
        """``constants[i][j][k]`` is c^k_ij; the array must be antisymmetric in i, j."""
        dimension = len(constants)
        brackets = {}
        for i, j in itertools.product(range(dimension), repeat=2):
            row = constants[i][j]
            if len(constants[i]) != dimension or len(row) != dimension:
                raise LieAlgebraError("structure constants must form an n x n x n array")
            other = constants[j][i]
            for k in range(dimension):
                if Fraction(row[k]) != -Fraction(other[k]):
                    raise LieAlgebraError(f"structure constants are not antisymmetric at [e{i + 1}, e{j + 1}]")
            if i < j:
                brackets[(i + 1, j + 1)] = {k + 1: row[k] for k in range(dimension) if Fraction(row[k])}
        return cls.from_brackets(name, dimension, brackets)

    def constant(self, i, j, k):
        """c^k_ij with 0-based indices, for any order of i and j."""
        if i == j:
            return Fraction(0)
        value = dict(self.constants).get((min(i, j), max(i, j), k), Fraction(0))
        return value if i < j else -value

    def bracket(self, x, y):
        """Bracket of coordinate vectors given as sequences of length n."""
        n = self.dimension
        return [
            sum(Fraction(x[i]) * Fraction(y[j]) * self.constant(i, j, k) for i in range(n) for j in range(n))
            for k in range(n)
        ]

    def check_jacobi(self):
        n = self.dimension
        for i, j, l in itertools.combinations(range(n), 3):
            for m in range(n):
                total = sum(
                    self.constant(i, j, k) * self.constant(k, l, m)
                    + self.constant(j, l, k) * self.constant(k, i, m)
                    + self.constant(l, i, k) * self.constant(k, j, m)
                    for k in range(n)
                )
                if total:
                    raise LieAlgebraError(
                        f"Jacobi identity fails for e{i + 1}, e{j + 1}, e{l + 1} in {self.name}"
                    )

    @property
    def is_abelian(self):
        return not self.constants

    def describe(self):
        return {
            "name": self.name,
            "dimension": self.dimension,
            "brackets": [
                {"i": i + 1, "j": j + 1, "k": k + 1, "c": value} for (i, j, k), value in self.constants
            ],
        }


SHIPPED = {
    "abelian": ("abelian", 2, {}),
    "solvable2": ("solvable2", 2, {(1, 2): {2: 1}}),
    "heisenberg": ("heisenberg", 3, {(1, 2): {3: 1}}),
    # basis h, e, f
    "sl2": ("sl2", 3, {(1, 2): {2: 2}, (1, 3): {3: -2}, (2, 3): {1: 1}}),
}


def shipped(name):
    if name not in SHIPPED:
        raise LieAlgebraError(f"unknown Lie algebra {name!r}; expected one of {', '.join(SHIPPED)}")
    return LieAlgebra.from_brackets(*SHIPPED[name])


def poisson_space(algebra, truncation=0):
    return Space(algebra.dimension, truncation=truncation)


def lie_to_mc(algebra, space=None):
    """
    The linear Poisson structure pi = sum_{i<j} c^k_ij x_k psi_i psi_j of
    ``algebra``, as a Maurer-Cartan element.
    """
    space = poisson_space(algebra) if space is None else space
    if space.dimension != algebra.dimension:
        raise LieAlgebraError("the space must have the dimension of the Lie algebra")
    terms = {}
    for (i, j, k), value in algebra.constants:
        key = [0] * space.size
        key[space.x_index(k)] = 1
        key[space.psi_index(i)] = 1
        key[space.psi_index(j)] = 1
        terms[tuple(key)] = terms.get(tuple(key), Fraction(0)) + value
    pi = PolyVector(space, terms)
    if schouten(pi, pi):
        raise NotMaurerCartanError(f"[pi, pi] does not vanish for {algebra.name}")
    logger.debug("Poisson structure of %s: %s", algebra.name, pi)
    return pi
