"""
Hochschild cochains with braces, the Gerstenhaber bracket and br.

Cochains are stored in the bar convention: a component of arity r is a map
A[1]^{(x) r} -> A[1], and ``degree`` is its degree in that grading. An input
a of A then has degree |a| - 1, and the brace

    x{y_1, .., y_p}(a_1, .., a_n)

is the sum over insertions of the y_k into the slots of x, each with the
Koszul sign of moving y_k past the inputs to its left. In this convention
the Gerstenhaber bracket has degree 0; ``hochschild_degree`` (bar degree + 1)
is the grading in which it has degree -1.

The same classes describe cochains on cochains: their target is a
``CochainSpace`` and their inputs and values are cochains.
"""
import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import singledispatch

from apps.core.exceptions import AlgebraError, NotMaurerCartanError
from apps.polyvector.algebra import PolyVector

logger = logging.getLogger(__name__)


@singledispatch
def homogeneous_parts(value):
    """Split a value into (bar degree, homogeneous part) pairs."""
    raise AlgebraError(f"cannot grade {type(value).__name__}")


@homogeneous_parts.register
def _(value: PolyVector):
    return [(degree - 1, part) for degree, part in value.parts_by_degree().items()]


@dataclass(frozen=True)
class CochainSpace:
    """Target of cochains whose values are cochains on ``base``."""

    base: object

    def zero(self):
        return Cochain(self.base, 0)


class Cochain:
    """
    Finite or lazily generated family of multilinear components.

    ``components`` maps an arity to a function ``(inputs, degrees)`` on
    homogeneous inputs; ``factory`` produces such functions on demand for
    cochains with unbounded support.
    """

    def __init__(self, target, degree, components=None, factory=None, name="", bound=None):
        self.target = target
        self.degree = degree
        self._components = dict(components or {})
        self._factory = factory
        self.name = name
        if factory is None:
            bound = max(self._components, default=-1)
        self.bound = bound

    @property
    def hochschild_degree(self):
        return self.degree + 1

    @property
    def is_zero(self):
        return not self._components and self._factory is None

    def component(self, arity):
        if self.bound is not None and arity > self.bound:
            return None
        if arity in self._components:
            return self._components[arity]
        if self._factory is not None:
            return self._factory(arity)
        return None

    def support(self, bound):
        return [r for r in range(bound + 1) if self.component(r) is not None]

    def __call__(self, *inputs):
        function = self.component(len(inputs))
        total = self.target.zero()
        if function is None:
            return total
        for combination in itertools.product(*(homogeneous_parts(v) for v in inputs)):
            degrees = [degree for degree, _ in combination]
            parts = [part for _, part in combination]
            total = total + function(parts, degrees)
        return total

    def _combine(self, other, scalar):
        if self.is_zero:
            return other.scale(scalar)
        if other.is_zero:
            return self
        if other.degree != self.degree:
            raise AlgebraError(f"cannot add cochains of degrees {self.degree} and {other.degree}")

        def factory(arity):
            first, second = self.component(arity), other.component(arity)
            if first is None and second is None:
                return None

            def evaluate(inputs, degrees):
                total = self.target.zero()
                if first is not None:
                    total = total + first(inputs, degrees)
                if second is not None:
                    total = total + second(inputs, degrees).scale(scalar)
                return total

            return evaluate

        bound = None if self.bound is None or other.bound is None else max(self.bound, other.bound)
        return Cochain(self.target, self.degree, factory=factory, name=f"({self.name}+{other.name})", bound=bound)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, scalar):
        scalar = Fraction(scalar)
        if not scalar or self.is_zero:
            return Cochain(self.target, self.degree)

        def factory(arity):
            function = self.component(arity)
            if function is None:
                return None
            return lambda inputs, degrees: function(inputs, degrees).scale(scalar)

        return Cochain(self.target, self.degree, factory=factory, name=self.name, bound=self.bound)

    def __repr__(self):
        return f"Cochain({self.name or '?'}, degree={self.degree})"


@homogeneous_parts.register
def _(value: Cochain):
    return [] if value.is_zero else [(value.degree, value)]


def koszul_suspension_sign(degrees):
    """Sign of moving the desuspensions of r inputs into place."""
    r = len(degrees)
    exponent = sum((r - 1 - j) * degree for j, degree in enumerate(degrees))
    return -1 if exponent % 2 else 1


def from_multilinear(function, arity, classical_degree, target, name=""):
    """
    Cochain of a classical multilinear map A^{(x) r} -> A of the given
    degree; its bar degree is classical_degree + r - 1.
    """

    def evaluate(inputs, degrees):
        value = function(*inputs)
        return value.scale(koszul_suspension_sign(degrees))

    return Cochain(target, classical_degree + arity - 1, {arity: evaluate}, name=name)


def constant_cochain(element, name=""):
    """Arity-zero cochain with value ``element`` (homogeneous)."""
    return from_multilinear(lambda: element, 0, element.degree, element.space, name or str(element))


def product_cochain(space):
    """The product of T_poly (or of functions) as a bar cochain of degree 1."""
    return from_multilinear(lambda a, b: a * b, 2, 0, space, name="mu")


def weak_compositions(total, parts):
    """Tuples of ``parts`` non-negative integers summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for bars in itertools.combinations(range(total + parts - 1), parts - 1):
        previous = -1
        sizes = []
        for bar in bars + (total + parts - 1,):
            sizes.append(bar - previous - 1)
            previous = bar
        yield tuple(sizes)


def brace(x, args):
    """x{y_1, .., y_p}: insert the y's into the slots of x, in order."""
    args = list(args)
    p = len(args)
    if p < 1:
        raise AlgebraError("a brace needs at least one argument")
    degree = x.degree + sum(y.degree for y in args)
    if x.is_zero or any(y.is_zero for y in args) or (x.bound is not None and x.bound < p):
        return Cochain(x.target, degree)
    bound = None
    if x.bound is not None and all(y.bound is not None for y in args):
        bound = x.bound - p + sum(y.bound for y in args)

    def factory(n):
        def evaluate(inputs, degrees):
            total = x.target.zero()
            for r in range(p, n + p + 1):
                if x.component(r) is None:
                    continue
                consumed = n - (r - p)
                for positions in itertools.combinations(range(r), p):
                    for arities in weak_compositions(consumed, p):
                        if any(y.component(a) is None for y, a in zip(args, arities, strict=True)):
                            continue
                        total = total + _insert(x, args, positions, arities, inputs, degrees, r)
            return total

        return evaluate

    name = f"{x.name}{{{','.join(y.name for y in args)}}}"
    return Cochain(x.target, degree, factory=factory, name=name, bound=bound)


def _insert(x, args, positions, arities, inputs, degrees, r):
    values = []
    pointer = 0
    sign = 1
    k = 0
    slots = set(positions)
    for slot in range(r):
        if slot in slots:
            y, size = args[k], arities[k]
            if (y.degree * sum(degrees[:pointer])) % 2:
                sign = -sign
            values.append(y(*inputs[pointer:pointer + size]))
            pointer += size
            k += 1
        else:
            values.append(inputs[pointer])
            pointer += 1
    return x(*values).scale(sign)


def gerstenhaber(x, y):
    """[x, y] = x{y} - (-1)^{|x||y|} y{x}, in bar degrees."""
    sign = -1 if (x.degree * y.degree) % 2 else 1
    return brace(x, [y]) - brace(y, [x]).scale(sign)


def br(x):
    """
    Cochain on cochains: arity 1 is z -> [x, z], arity p >= 2 is
    (z_1, .., z_p) -> x{z_1, .., z_p}.
    """

    def factory(p):
        if p == 0:
            return None
        if p == 1:
            return lambda inputs, degrees: gerstenhaber(x, inputs[0])
        return lambda inputs, degrees: brace(x, inputs)

    return Cochain(CochainSpace(x.target), x.degree, factory=factory, name=f"br({x.name})")


class AInfinity:
    """
    Formal A-infinity structure: one cochain of bar degree 1 per power of
    the formal parameter, up to ``order``.
    """

    def __init__(self, pieces, order=None):
        self.pieces = dict(pieces)
        if not self.pieces:
            raise AlgebraError("an A-infinity structure needs at least one piece")
        for power, piece in self.pieces.items():
            if not piece.is_zero and piece.degree != 1:
                raise AlgebraError(f"piece at order {power} has degree {piece.degree}, expected 1")
        self.order = max(self.pieces) if order is None else order
        self.target = next(iter(self.pieces.values())).target

    @classmethod
    def associative(cls, space):
        return cls({0: product_cochain(space)}, order=0)

    def piece(self, power):
        return self.pieces.get(power, Cochain(self.target, 1))

    def is_flat(self):
        return all(piece.component(0) is None for piece in self.pieces.values())

    def maurer_cartan_defect(self, power):
        """Coefficient of the formal parameter to ``power`` in m{m}."""
        total = Cochain(self.target, 2)
        for i in range(power + 1):
            total = total + brace(self.piece(i), [self.piece(power - i)])
        return total

    def check(self, samples):
        """Raise NotMaurerCartanError when m{m} is nonzero on a sample."""
        for power in range(self.order + 1):
            defect = self.maurer_cartan_defect(power)
            for inputs in samples:
                if defect(*inputs):
                    raise NotMaurerCartanError(
                        f"m{{m}} is nonzero at order {power} on {len(inputs)} inputs"
                    )
        logger.debug("Maurer-Cartan equation holds on %d samples", len(samples))
        return True

    def differential(self, x, power=0):
        """
        Coefficient of the formal parameter to ``power`` in [m, x].

        A cochain ``x`` is constant in the formal parameter and gives the
        cochain [m_power, x]. A mapping from powers to cochains is a formal
        cochain; the terms [m_i, x_j] with i + j = power then carry different
        bar degrees in general, so the result maps each bar degree to the sum
        of its terms.
        """
        if isinstance(x, Cochain):
            return gerstenhaber(self.piece(power), x)
        graded = {}
        for j, part in sorted(x.items()):
            if j > power:
                continue
            term = gerstenhaber(self.piece(power - j), part)
            graded[term.degree] = graded[term.degree] + term if term.degree in graded else term
        return graded

    def cup(self, power=0):
        """Coefficient of the formal parameter to ``power`` in br(m)."""
        return br(self.piece(power))


def evaluate_graded(graded, inputs):
    """Sum of the values of every cochain of a graded differential on ``inputs``."""
    values = [cochain(*inputs) for _, cochain in sorted(graded.items())]
    if not values:
        return None
    total = values[0]
    for value in values[1:]:
        total = total + value
    return total


def differential(m, x, power=0):
    return m.differential(x, power)


def cup(m, power=0):
    return m.cup(power)
