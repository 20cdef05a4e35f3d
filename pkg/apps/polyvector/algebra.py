"""
Truncated formal polyvector fields on a graded vector space V.

A polyvector is a polynomial in the even/odd generators x^1..x^n (coordinates
on V) and psi_1..psi_n (the shifted copy V[-1]). Monomials are exponent tuples
``(e_1, .., e_n, f_1, .., f_n)`` read as the ordered product
``x^1^e_1 .. x^n^e_n psi_1^f_1 .. psi_n^f_n``; odd generators appear at most
once. Products drop monomials whose polynomial degree exceeds the truncation,
so all results are exact below the truncation bound.
"""
import logging
import re
from dataclasses import dataclass
from fractions import Fraction

from django.conf import settings

from apps.core.exceptions import AlgebraError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Space:
    dimension: int
    degrees: tuple = ()
    truncation: int = 0

    def __post_init__(self):
        if self.dimension < 1:
            raise AlgebraError("dimension must be positive")
        degrees = tuple(self.degrees) or (0,) * self.dimension
        if len(degrees) != self.dimension:
            raise AlgebraError("one degree per generator of V is required")
        object.__setattr__(self, "degrees", degrees)
        if not self.truncation:
            object.__setattr__(self, "truncation", settings.WORKBENCH_TRUNCATION)
        if self.truncation < 1:
            raise AlgebraError("truncation must be at least 1")

    @property
    def size(self):
        return 2 * self.dimension

    def generator_degree(self, g):
        """x^a has degree -deg(v_a), psi_a has degree 1 - deg(v_a)."""
        n = self.dimension
        if g < n:
            return -self.degrees[g]
        return 1 - self.degrees[g - n]

    def parity(self, g):
        return self.generator_degree(g) % 2

    def x_index(self, a):
        return a

    def psi_index(self, a):
        return self.dimension + a

    def monomial_degree(self, key):
        return sum(e * self.generator_degree(g) for g, e in enumerate(key) if e)

    def monomial_parity(self, key):
        return sum(e * self.parity(g) for g, e in enumerate(key) if e) % 2

    def polynomial_degree(self, key):
        return sum(key[: self.dimension])

    def psi_degree(self, key):
        return sum(key[self.dimension:])

    def unit_key(self):
        return (0,) * self.size

    def generator_key(self, g):
        key = [0] * self.size
        key[g] = 1
        return tuple(key)

    # Constructors

    def zero(self):
        return PolyVector(self)

    def one(self):
        return PolyVector(self, {self.unit_key(): 1})

    def x(self, a):
        """The coordinate x^a, with a counted from 1."""
        return PolyVector(self, {self.generator_key(self._check(a) - 1): 1})

    def psi(self, a):
        """The odd generator psi_a, with a counted from 1."""
        return PolyVector(self, {self.generator_key(self.dimension + self._check(a) - 1): 1})

    def _check(self, a):
        if not 1 <= a <= self.dimension:
            raise AlgebraError(f"generator index {a} outside 1..{self.dimension}")
        return a


def multiply_monomials(space, left, right):
    """Product of two monomials as (sign, key), or None when it vanishes."""
    sign = 1
    odd_to_the_right = 0
    # walk generators from the top index down, counting odd factors of ``left``
    # that each odd factor of ``right`` has to pass
    for g in range(space.size - 1, -1, -1):
        if space.parity(g):
            if left[g] and right[g]:
                return None
            if right[g] and odd_to_the_right % 2:
                sign = -sign
            odd_to_the_right += left[g]
    key = tuple(a + b for a, b in zip(left, right, strict=True))
    if space.polynomial_degree(key) > space.truncation:
        return None
    return sign, key


def derive_monomial(space, key, g):
    """Left derivative by generator g: (coefficient, key) or None."""
    exponent = key[g]
    if not exponent:
        return None
    coefficient = exponent
    if space.parity(g):
        passed = sum(key[h] * space.parity(h) for h in range(g))
        if passed % 2:
            coefficient = -coefficient
    reduced = list(key)
    reduced[g] -= 1
    return coefficient, tuple(reduced)


class PolyVector:
    """Finite sum of monomials with exact rational coefficients."""

    __slots__ = ("space", "_terms")

    def __init__(self, space, terms=None):
        self.space = space
        self._terms = {}
        for key, coefficient in (terms or {}).items():
            key = tuple(key)
            if len(key) != space.size:
                raise AlgebraError(f"monomial {key} has the wrong number of exponents")
            if any(e < 0 for e in key):
                raise AlgebraError(f"negative exponent in {key}")
            if any(key[g] > 1 for g in range(space.size) if space.parity(g)):
                raise AlgebraError(f"odd generator repeated in {key}")
            if space.polynomial_degree(key) > space.truncation:
                continue
            value = self._terms.get(key, Fraction(0)) + Fraction(coefficient)
            if value:
                self._terms[key] = value
            else:
                self._terms.pop(key, None)

    @classmethod
    def _from_clean(cls, space, terms):
        result = cls(space)
        result._terms = {key: value for key, value in terms.items() if value}
        return result

    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        return sorted(
            self._terms.items(),
            key=lambda item: (
                self.space.psi_degree(item[0]),
                self.space.polynomial_degree(item[0]),
                tuple(-e for e in item[0]),
            ),
        )

    def coefficient(self, key):
        return self._terms.get(tuple(key), Fraction(0))

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if isinstance(other, int | Fraction) and not other:
            return not self._terms
        if not isinstance(other, PolyVector):
            return NotImplemented
        return self.space == other.space and self._terms == other._terms

    __hash__ = None

    def _same_space(self, other):
        if other.space != self.space:
            raise AlgebraError("polyvectors live on different spaces")

    def __add__(self, other):
        self._same_space(other)
        terms = dict(self._terms)
        for key, value in other._terms.items():
            terms[key] = terms.get(key, Fraction(0)) + value
        return PolyVector._from_clean(self.space, terms)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, scalar):
        scalar = Fraction(scalar)
        return PolyVector._from_clean(
            self.space, {key: scalar * value for key, value in self._terms.items()}
        )

    def __mul__(self, other):
        if isinstance(other, PolyVector):
            return product(self, other)
        return self.scale(other)

    def __rmul__(self, scalar):
        return self.scale(scalar)

    # Gradings

    def degrees(self):
        return sorted({self.space.monomial_degree(key) for key in self._terms})

    def is_homogeneous(self):
        return len(self.degrees()) <= 1

    @property
    def degree(self):
        """Cohomological degree of a nonzero homogeneous element."""
        found = self.degrees()
        if len(found) != 1:
            raise AlgebraError(f"{self} is not homogeneous and nonzero")
        return found[0]

    def parts_by_degree(self):
        parts = {}
        for key, value in self._terms.items():
            parts.setdefault(self.space.monomial_degree(key), {})[key] = value
        return {
            degree: PolyVector._from_clean(self.space, terms)
            for degree, terms in sorted(parts.items())
        }

    def psi_degree_parts(self):
        parts = {}
        for key, value in self._terms.items():
            parts.setdefault(self.space.psi_degree(key), {})[key] = value
        return {
            degree: PolyVector._from_clean(self.space, terms)
            for degree, terms in sorted(parts.items())
        }

    def is_function(self):
        """True when no monomial contains a psi."""
        return all(not self.space.psi_degree(key) for key in self._terms)

    def derivative(self, g):
        """Left derivative by the generator with internal index g."""
        terms = {}
        for key, value in self._terms.items():
            found = derive_monomial(self.space, key, g)
            if found is None:
                continue
            coefficient, reduced = found
            terms[reduced] = terms.get(reduced, Fraction(0)) + coefficient * value
        return PolyVector._from_clean(self.space, terms)

    def __str__(self):
        return format_polyvector(self)

    def __repr__(self):
        return f"PolyVector({self})"


def product(a, b):
    """Graded-commutative product with Koszul signs, truncated."""
    a._same_space(b)
    space = a.space
    terms = {}
    for ka, va in a._terms.items():
        for kb, vb in b._terms.items():
            found = multiply_monomials(space, ka, kb)
            if found is None:
                continue
            sign, key = found
            terms[key] = terms.get(key, Fraction(0)) + sign * va * vb
    return PolyVector._from_clean(space, terms)


def project_to_O(a):
    """Keep only the psi-free monomials."""
    space = a.space
    return PolyVector._from_clean(
        space, {key: value for key, value in a._terms.items() if not space.psi_degree(key)}
    )


class Tensor:
    """
    Element of the tensor power of T_poly: a sum of tensor words of
    monomials with rational coefficients.
    """

    __slots__ = ("space", "arity", "_terms")

    def __init__(self, space, arity, terms=None):
        self.space = space
        self.arity = arity
        self._terms = {}
        for word, value in (terms or {}).items():
            if len(word) != arity:
                raise AlgebraError("tensor word of the wrong length")
            if value:
                self._terms[tuple(word)] = self._terms.get(tuple(word), Fraction(0)) + Fraction(value)
        self._terms = {word: value for word, value in self._terms.items() if value}

    @classmethod
    def of(cls, inputs):
        """Tensor product of a sequence of polyvectors."""
        inputs = list(inputs)
        if not inputs:
            raise AlgebraError("a tensor needs at least one factor")
        space = inputs[0].space
        words = {(): Fraction(1)}
        for factor in inputs:
            factor._same_space(inputs[0])
            words = {
                word + (key,): value * coefficient
                for word, value in words.items()
                for key, coefficient in factor._terms.items()
            }
        return cls(space, len(inputs), words)

    def items(self):
        return sorted(self._terms.items())

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if not isinstance(other, Tensor):
            return NotImplemented
        return (self.space, self.arity, self._terms) == (other.space, other.arity, other._terms)

    __hash__ = None

    def __add__(self, other):
        if other.space != self.space or other.arity != self.arity:
            raise AlgebraError("tensors of different shapes")
        terms = dict(self._terms)
        for word, value in other._terms.items():
            terms[word] = terms.get(word, Fraction(0)) + value
        return Tensor(self.space, self.arity, terms)

    def scale(self, scalar):
        scalar = Fraction(scalar)
        return Tensor(self.space, self.arity, {w: scalar * v for w, v in self._terms.items()})

    def slot(self, word, i):
        return PolyVector(self.space, {word[i]: 1})

    def apply_derivative(self, slot, g):
        """
        Act by the left derivative of generator g on one slot, with the
        Koszul sign of passing the preceding slots.
        """
        self._check_slot(slot)
        space = self.space
        odd_operator = space.parity(g)
        terms = {}
        for word, value in self._terms.items():
            found = derive_monomial(space, word[slot], g)
            if found is None:
                continue
            coefficient, reduced = found
            if odd_operator and sum(space.monomial_parity(k) for k in word[:slot]) % 2:
                coefficient = -coefficient
            new_word = word[:slot] + (reduced,) + word[slot + 1:]
            terms[new_word] = terms.get(new_word, Fraction(0)) + coefficient * value
        return Tensor(space, self.arity, terms)

    def tau(self, s, t):
        """tau_{s,t}: sum over a of d/dpsi_a on slot s after d/dx^a on slot t."""
        self._check_slot(s)
        self._check_slot(t)
        if s == t:
            raise AlgebraError("tau needs two distinct slots")
        space = self.space
        result = Tensor(space, self.arity)
        for a in range(space.dimension):
            step = self.apply_derivative(t, space.x_index(a))
            if step:
                result = result + step.apply_derivative(s, space.psi_index(a))
        return result

    def multiply(self):
        """Multiply the slots of every word, left to right."""
        space = self.space
        terms = {}
        for word, value in self._terms.items():
            sign, key = 1, word[0]
            for factor in word[1:]:
                found = multiply_monomials(space, key, factor)
                if found is None:
                    break
                step, key = found
                sign *= step
            else:
                terms[key] = terms.get(key, Fraction(0)) + sign * value
        return PolyVector._from_clean(space, terms)

    def _check_slot(self, slot):
        if not 0 <= slot < self.arity:
            raise AlgebraError(f"slot {slot} outside 0..{self.arity - 1}")


def tau(a, b):
    """tau(a (x) b) = sum_a d/dpsi_a(a) (x) d/dx^a(b), as a two-slot tensor."""
    return Tensor.of([a, b]).tau(0, 1)


def tau_st(inputs, s, t):
    """tau on slots s, t (counted from 0) of the tensor product of ``inputs``."""
    tensor = inputs if isinstance(inputs, Tensor) else Tensor.of(inputs)
    return tensor.tau(s, t)


def schouten(a, b):
    """
    m tau (a (x) b) + (-1)^{|a||b|} m tau (b (x) a).

    Graded symmetric of degree -1; inhomogeneous inputs are split into
    homogeneous parts.
    """
    a._same_space(b)
    result = a.space.zero()
    for da, pa in a.parts_by_degree().items():
        for db, pb in b.parts_by_degree().items():
            forward = tau(pa, pb).multiply()
            backward = tau(pb, pa).multiply()
            if (da * db) % 2:
                backward = -backward
            result = result + forward + backward
    return result


# Text format

_FACTOR = re.compile(r"^(?:(?P<num>\d+)(?:/(?P<den>\d+))?|(?P<gen>x|psi)(?P<index>\d+)(?:\^(?P<power>\d+))?)$")
_TERM = re.compile(r"([+-]?)([^+-]+)")


def format_monomial(space, key):
    factors = []
    n = space.dimension
    for a in range(n):
        if key[a] == 1:
            factors.append(f"x{a + 1}")
        elif key[a] > 1:
            factors.append(f"x{a + 1}^{key[a]}")
    for a in range(n):
        if key[n + a]:
            factors.append(f"psi{a + 1}" if key[n + a] == 1 else f"psi{a + 1}^{key[n + a]}")
    return "*".join(factors)


def format_polyvector(p):
    """Canonical text such as ``3/2*x1^2*psi1 - psi2``."""
    pieces = []
    for key, value in p.items():
        monomial = format_monomial(p.space, key)
        magnitude = abs(value)
        if not monomial:
            body = str(magnitude)
        elif magnitude == 1:
            body = monomial
        else:
            body = f"{magnitude}*{monomial}"
        if not pieces:
            pieces.append(f"-{body}" if value < 0 else body)
        else:
            pieces.append(f"{'-' if value < 0 else '+'} {body}")
    return " ".join(pieces) or "0"


def parse_polyvector(text, space):
    """
    Parse a sum of products of rationals, ``x<i>^k`` and ``psi<i>`` (or
    ``ψ<i>``). Factors are multiplied in the written order.
    """
    cleaned = (
        text.replace("ψ", "psi").replace("−", "-").replace("·", "*").replace(" ", "")
    )
    if not cleaned:
        raise AlgebraError("empty polyvector text")
    if cleaned == "0":
        return space.zero()
    position = 0
    result = space.zero()
    for match in _TERM.finditer(cleaned):
        if match.start() != position:
            raise AlgebraError(f"cannot parse {text!r}")
        position = match.end()
        term = space.one()
        for factor in match.group(2).split("*"):
            term = term * _parse_factor(factor, space, text)
        result = result - term if match.group(1) == "-" else result + term
    if position != len(cleaned):
        raise AlgebraError(f"cannot parse {text!r}")
    return result


def _parse_factor(factor, space, text):
    match = _FACTOR.match(factor)
    if match is None:
        raise AlgebraError(f"unknown factor {factor!r} in {text!r}")
    if match.group("num") is not None:
        denominator = int(match.group("den") or 1)
        if not denominator:
            raise AlgebraError(f"zero denominator in {text!r}")
        return space.one().scale(Fraction(int(match.group("num")), denominator))
    index = int(match.group("index"))
    generator = space.x(index) if match.group("gen") == "x" else space.psi(index)
    result = space.one()
    for _ in range(int(match.group("power") or 1)):
        result = result * generator
    return result
