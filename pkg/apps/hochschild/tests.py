import numpy as np
from django.test import SimpleTestCase

from apps.core.exceptions import AlgebraError, NotMaurerCartanError
from apps.polyvector.algebra import Space, parse_polyvector
from apps.polyvector.sampling import random_polyvector

from .cochains import (
    AInfinity,
    Cochain,
    br,
    brace,
    constant_cochain,
    cup,
    differential,
    evaluate_graded,
    from_multilinear,
    gerstenhaber,
    product_cochain,
    weak_compositions,
)


def random_cochain(space, rng, arity, psi_degree, odd_derivative=False):
    """Multiplication by a random polyvector after a partial derivative."""
    q = random_polyvector(space, rng, psi_degree, max_polynomial_degree=1, terms=2)
    if arity == 0:
        return constant_cochain(q, name="c")
    g = space.psi_index(0) if odd_derivative else space.x_index(1)
    degree = psi_degree - space.generator_degree(g)
    if arity == 1:
        return from_multilinear(lambda a: q * a.derivative(g), 1, degree, space, name="f")
    return from_multilinear(lambda a, b: a * q * b.derivative(g), 2, degree, space, name="h")


def random_inputs(space, rng, arity):
    return tuple(
        random_polyvector(space, rng, int(rng.integers(0, 3)), max_polynomial_degree=1, terms=2)
        for _ in range(arity)
    )


class CochainTestCase(SimpleTestCase):
    """Shared fixtures: a small truncated T_poly, random cochains and inputs."""

    def setUp(self):
        self.space = Space(2, truncation=3)
        self.rng = np.random.default_rng(314)
        self.samples = [random_inputs(self.space, self.rng, n) for n in (0, 1, 2, 2, 3)]
        mixed = self.space.x(1) + self.space.psi(2)
        self.samples.append((mixed, self.space.psi(1)))

    def cochains(self):
        rng = self.rng
        return [
            random_cochain(self.space, rng, 0, 2),
            random_cochain(self.space, rng, 1, 1),
            random_cochain(self.space, rng, 1, 1, odd_derivative=True),
            random_cochain(self.space, rng, 2, 1),
            random_cochain(self.space, rng, 2, 1, odd_derivative=True),
        ]

    def assertAgree(self, first, second, samples=None):
        for inputs in samples or self.samples:
            self.assertEqual(first(*inputs), second(*inputs), (first, second, len(inputs)))

    def assertVanishes(self, cochain, samples=None):
        for inputs in samples or self.samples:
            self.assertFalse(cochain(*inputs), (cochain, len(inputs)))


class BraceTest(CochainTestCase):
    """Test cases for brace operations."""

    def setUp(self):
        super().setUp()
        self.mu = product_cochain(self.space)
        self.d1 = from_multilinear(lambda a: a.derivative(0), 1, 0, self.space, name="d1")

    def test_weak_compositions(self):
        """Test the distributions of inputs among inserted cochains."""
        self.assertEqual(sorted(weak_compositions(2, 2)), [(0, 2), (1, 1), (2, 0)])
        self.assertEqual(list(weak_compositions(0, 0)), [()])
        self.assertEqual(list(weak_compositions(1, 0)), [])

    def test_product_with_derivation(self):
        """Test that mu{d} on functions is minus the derivative of the product."""
        a = parse_polyvector("x1^2", self.space)
        b = parse_polyvector("x1 + x2", self.space)
        result = brace(self.mu, [self.d1])(a, b)
        self.assertEqual(result, (a * b).derivative(0).scale(-1))

    def test_constant_insertion(self):
        """Test inserting an arity-zero cochain into each slot."""
        x = from_multilinear(lambda a, b: a * b.derivative(0), 2, 0, self.space, name="x")
        c = constant_cochain(self.space.x(2))
        a = parse_polyvector("x1^2", self.space)
        self.assertEqual(brace(x, [c])(a), parse_polyvector("-2*x1*x2", self.space))
        self.assertEqual(brace(x, [c]).degree, 0)

    def test_too_many_arguments(self):
        """Test that a brace with more arguments than slots vanishes."""
        self.assertVanishes(brace(self.d1, [self.d1, self.d1]))

    def test_empty_brace_rejected(self):
        """Test that a brace needs an argument."""
        with self.assertRaises(AlgebraError):
            brace(self.mu, [])

    def test_pre_lie_identity(self):
        """Test that x{y}{z} - x{y{z}} is graded symmetric in y and z."""
        cochains = self.cochains()
        x = cochains[3]
        for y in cochains:
            for z in cochains[1:3]:
                left = brace(brace(x, [y]), [z]) - brace(x, [brace(y, [z])])
                right = brace(brace(x, [z]), [y]) - brace(x, [brace(z, [y])])
                sign = -1 if (y.degree * z.degree) % 2 else 1
                self.assertAgree(left, right.scale(sign))


class GerstenhaberTest(CochainTestCase):
    """Test cases for the Gerstenhaber bracket."""

    def test_associative_product(self):
        """Test that the bracket of an associative product with itself vanishes."""
        mu = product_cochain(self.space)
        self.assertVanishes(gerstenhaber(mu, mu))
        self.assertVanishes(brace(mu, [mu]))

    def test_antisymmetry(self):
        """Test graded antisymmetry on random cochains."""
        cochains = self.cochains()
        for x in cochains:
            for y in cochains:
                sign = -1 if (x.degree * y.degree) % 2 else 1
                self.assertAgree(gerstenhaber(y, x), gerstenhaber(x, y).scale(-sign))

    def test_jacobi(self):
        """Test the graded Jacobi identity on random cochains of arity at most two."""
        x, y, z = self.cochains()[1:4]
        left = gerstenhaber(x, gerstenhaber(y, z))
        sign = -1 if (x.degree * y.degree) % 2 else 1
        right = gerstenhaber(gerstenhaber(x, y), z) + gerstenhaber(y, gerstenhaber(x, z)).scale(sign)
        self.assertAgree(left, right)

    def test_degree(self):
        """Test that the bracket has degree -1 in the shifted grading."""
        for x in self.cochains():
            for y in self.cochains():
                bracket = gerstenhaber(x, y)
                self.assertEqual(bracket.hochschild_degree, x.hochschild_degree + y.hochschild_degree - 1)
                self.assertEqual(bracket.degree, x.degree + y.degree)


class DifferentialTest(CochainTestCase):
    """Test cases for the Hochschild differential [m, -]."""

    def setUp(self):
        super().setUp()
        self.m = AInfinity.associative(self.space)
        self.mu = product_cochain(self.space)

    def test_zero_cochain(self):
        """Test d of a constant against its expansion, which vanishes for T_poly."""
        element = self.space.x(2) * self.space.psi(1)
        c = constant_cochain(element)
        d = self.m.differential(c)
        for a in (self.space.x(1), self.space.psi(2), self.space.x(1) * self.space.psi(1)):
            sign = -1 if (c.degree * (a.degree - 1)) % 2 else 1
            expected = self.mu(element, a) + self.mu(a, element).scale(sign)
            self.assertEqual(d(a), expected)
            self.assertFalse(d(a))

    def test_bivector_cocycle(self):
        """Test that the biderivation of a bivector is a Hochschild cocycle on functions."""
        space = Space(2, truncation=6)
        x1 = space.x(1)

        def bivector(f, g):
            return x1 * f.derivative(0) * g.derivative(1) - x1 * f.derivative(1) * g.derivative(0)

        hkr = from_multilinear(bivector, 2, 0, space, name="pi")
        rng = np.random.default_rng(5)
        functions = [
            tuple(random_polyvector(space, rng, 0, max_polynomial_degree=2) for _ in range(3))
            for _ in range(4)
        ]
        self.assertEqual(hkr(space.x(1), space.x(2)), -x1)
        self.assertVanishes(AInfinity.associative(space).differential(hkr), functions)

    def test_square_zero(self):
        """Test d(d(x)) = 0 on random cochains."""
        for x in self.cochains():
            self.assertVanishes(self.m.differential(self.m.differential(x)))

    def test_not_maurer_cartan(self):
        """Test that a non-associative product is rejected."""
        x = from_multilinear(lambda a, b: a * b.derivative(0), 2, 0, self.space, name="x")
        one = self.space.one()
        inputs = (one, one, parse_polyvector("x1^2", self.space))
        self.assertEqual(AInfinity({0: x}).maurer_cartan_defect(0)(*inputs), parse_polyvector("-2", self.space))
        with self.assertRaises(NotMaurerCartanError):
            AInfinity({0: x}).check([inputs])
        self.assertTrue(self.m.check(self.samples))

    def test_piece_degree(self):
        """Test that pieces of an A-infinity structure have degree one."""
        with self.assertRaises(AlgebraError):
            AInfinity({0: self.cochains()[2]})


class CupTest(CochainTestCase):
    """Test cases for the cup product br(m)."""

    def setUp(self):
        super().setUp()
        self.cup = AInfinity.associative(self.space).cup()
        self.d1 = from_multilinear(lambda a: a.derivative(0), 1, 0, self.space, name="d1")
        self.d2 = from_multilinear(lambda a: a.derivative(1), 1, 0, self.space, name="d2")

    def test_binary_cup_of_derivations(self):
        """Test that the cup of two derivations multiplies their values."""
        a = parse_polyvector("x1^2 + x2", self.space)
        b = parse_polyvector("x1*x2", self.space)
        product = self.cup(self.d1, self.d2)
        self.assertEqual(product(a, b), (a.derivative(0) * b.derivative(1)).scale(-1))

    def test_unit(self):
        """Test that the cup with the unit constant is minus the identity."""
        unit = constant_cochain(self.space.one())
        a = self.space.x(1) * self.space.x(1) * self.space.psi(2)
        self.assertEqual(self.cup(unit, self.d1)(a), self.d1(a).scale(-1))

    def test_higher_components_vanish(self):
        """Test that an associative product gives no ternary cup."""
        self.assertVanishes(self.cup(self.d1, self.d2, self.d1))

    def test_arity_one_is_differential(self):
        """Test that the unary part of the cup is the differential."""
        m = AInfinity.associative(self.space)
        for x in self.cochains():
            self.assertAgree(self.cup(x), m.differential(x))


class FormalStructureTest(CochainTestCase):
    """Test cases for the differential and cup of a structure with several orders."""

    def setUp(self):
        super().setUp()
        self.mu = product_cochain(self.space)
        self.h = from_multilinear(lambda a, b: a * b.derivative(0), 2, 0, self.space, name="h")
        self.m = AInfinity({0: self.mu, 1: self.h})
        self.y, self.z = self.cochains()[1:3]

    def test_constant_cochain(self):
        """Test that a cochain constant in h only meets the piece of the same order."""
        self.assertAgree(self.m.differential(self.y, 1), gerstenhaber(self.h, self.y))
        self.assertAgree(differential(self.m, self.y), gerstenhaber(self.mu, self.y))
        self.assertVanishes(self.m.differential(self.y, 2))

    def test_formal_cochain(self):
        """Test that the first order collects [m_1, x_0] and [m_0, x_1] by degree."""
        graded = self.m.differential({0: self.y, 1: self.z}, 1)
        self.assertEqual(set(graded), {self.y.degree + 1, self.z.degree + 1})
        self.assertAgree(graded[self.y.degree + 1], gerstenhaber(self.h, self.y))
        self.assertAgree(graded[self.z.degree + 1], gerstenhaber(self.mu, self.z))
        for inputs in self.samples:
            expected = gerstenhaber(self.h, self.y)(*inputs) + gerstenhaber(self.mu, self.z)(*inputs)
            self.assertEqual(evaluate_graded(graded, inputs), expected)

    def test_lowest_order_ignores_higher_terms(self):
        """Test that terms above the requested order do not contribute."""
        graded = differential(self.m, {0: self.y, 1: self.z})
        self.assertEqual(set(graded), {self.y.degree + 1})
        self.assertAgree(graded[self.y.degree + 1], gerstenhaber(self.mu, self.y))
        self.assertIsNone(evaluate_graded({}, ()))

    def test_cup_per_order(self):
        """Test that the cup at each order is br of the matching piece."""
        for power, piece in ((0, self.mu), (1, self.h)):
            self.assertAgree(cup(self.m, power)(self.y), gerstenhaber(piece, self.y))
            self.assertAgree(self.m.cup(power)(self.y, self.z), brace(piece, [self.y, self.z]))
        self.assertVanishes(self.m.cup(2)(self.y))


class BrTest(CochainTestCase):
    """Test cases for br into cochains on cochains."""

    def assertCochainsAgree(self, first, second):
        self.assertEqual(first.degree, second.degree)
        self.assertAgree(first, second)

    def test_defining_formula(self):
        """Test br(x) on one and two cochains."""
        x, y, z = self.cochains()[2:5]
        self.assertCochainsAgree(br(x)(y), gerstenhaber(x, y))
        self.assertCochainsAgree(br(x)(y, z), brace(x, [y, z]))
        self.assertTrue(br(x)().is_zero)

    def test_zero(self):
        """Test br(0) = 0."""
        zero = Cochain(self.space, 1)
        y, z = self.cochains()[1:3]
        self.assertTrue(br(zero)(y).is_zero)
        self.assertTrue(br(zero)(y, z).is_zero)

    def test_lie_map(self):
        """Test br([x, y]) = [br(x), br(y)] on one and two test cochains."""
        cochains = self.cochains()
        pairs = [(cochains[1], cochains[3]), (cochains[2], cochains[4])]
        tests = [(cochains[2],), (cochains[1], cochains[2]), (cochains[0], cochains[2])]
        for x, y in pairs:
            left = br(gerstenhaber(x, y))
            right = gerstenhaber(br(x), br(y))
            self.assertEqual(left.degree, right.degree)
            for zs in tests:
                self.assertCochainsAgree(left(*zs), right(*zs))
