from fractions import Fraction

import numpy as np
from django.test import SimpleTestCase

from apps.core.exceptions import AlgebraError, SlotTypeError
from apps.graphs.cooperad import operad_compose
from apps.graphs.structures import DirectedGraph, Flavor, VertexSet

from .algebra import (
    PolyVector,
    Space,
    Tensor,
    parse_polyvector,
    product,
    project_to_O,
    schouten,
    tau,
    tau_st,
)
from .representation import phi, phi_sum
from .sampling import random_polyvector


def c_graph(labels, edges):
    return DirectedGraph(VertexSet(Flavor.C, tuple(labels)), tuple(edges))


def oracle_product(space, left, right):
    """Multiply two monomial keys by sorting generator words with adjacent swaps."""
    word = [g for g in range(space.size) for _ in range(left[g])]
    word += [g for g in range(space.size) for _ in range(right[g])]
    sign = 1
    for i in range(len(word)):
        for j in range(len(word) - 1 - i):
            if word[j] > word[j + 1]:
                if space.parity(word[j]) and space.parity(word[j + 1]):
                    sign = -sign
                word[j], word[j + 1] = word[j + 1], word[j]
    key = [0] * space.size
    for g in word:
        key[g] += 1
    if any(key[g] > 1 for g in range(space.size) if space.parity(g)):
        return space.zero()
    return PolyVector(space, {tuple(key): sign})


class ProductTest(SimpleTestCase):
    """Test cases for the graded-commutative product."""

    def setUp(self):
        self.space = Space(2, truncation=6)
        self.x1, self.x2 = self.space.x(1), self.space.x(2)
        self.psi1, self.psi2 = self.space.psi(1), self.space.psi(2)

    def test_even_product(self):
        """Test that x times x is x squared."""
        self.assertEqual(self.x1 * self.x1, parse_polyvector("x1^2", self.space))

    def test_odd_anticommute(self):
        """Test that the odd generators anticommute."""
        self.assertEqual(self.psi1 * self.psi2, -(self.psi2 * self.psi1))
        self.assertFalse(self.psi1 * self.psi1)

    def test_mixed_product(self):
        """Test the sign of (x1 psi1)(x2 psi2)."""
        result = (self.x1 * self.psi1) * (self.x2 * self.psi2)
        self.assertEqual(result, PolyVector(self.space, {(1, 1, 1, 1): 1}))

    def test_sign_oracle(self):
        """Test monomial products against explicit transposition counting."""
        space = Space(3, truncation=6)
        rng = np.random.default_rng(7)
        for _ in range(200):
            keys = []
            for _ in range(2):
                x_part = tuple(int(e) for e in rng.integers(0, 2, size=3))
                psi_part = tuple(int(e) for e in rng.integers(0, 2, size=3))
                keys.append(x_part + psi_part)
            left = PolyVector(space, {keys[0]: 1})
            right = PolyVector(space, {keys[1]: 1})
            self.assertEqual(product(left, right), oracle_product(space, *keys))

    def test_truncation(self):
        """Test that products above the truncation vanish."""
        space = Space(1, truncation=2)
        x = space.x(1)
        self.assertFalse(x * x * x)

    def test_odd_repetition_rejected(self):
        """Test that a repeated odd generator is rejected."""
        with self.assertRaises(AlgebraError):
            PolyVector(self.space, {(0, 0, 2, 0): 1})


class TauTest(SimpleTestCase):
    """Test cases for the tau operator."""

    def setUp(self):
        self.space = Space(2, truncation=6)
        self.one = self.space.one()
        self.x1, self.x2 = self.space.x(1), self.space.x(2)
        self.psi1, self.psi2 = self.space.psi(1), self.space.psi(2)

    def test_psi_against_x(self):
        """Test that tau(psi1 (x) x1) is 1 (x) 1."""
        self.assertEqual(tau(self.psi1, self.x1), Tensor.of([self.one, self.one]))

    def test_no_psi(self):
        """Test that tau vanishes without a psi in the first slot."""
        self.assertFalse(tau(self.x1, self.x1))

    def test_two_terms(self):
        """Test the signed expansion of tau(psi1 psi2 (x) x1 x2)."""
        expected = Tensor.of([self.psi2, self.x2]) + Tensor.of([self.psi1, self.x1]).scale(-1)
        self.assertEqual(tau(self.psi1 * self.psi2, self.x1 * self.x2), expected)

    def test_slots_reduce_to_tau(self):
        """Test that two slots reduce to tau."""
        a, b = self.psi1 * self.x2, self.x1 * self.x1
        self.assertEqual(tau_st([a, b], 0, 1), tau(a, b))

    def test_sign_across_slots(self):
        """Test the Koszul sign of passing an odd slot."""
        result = tau_st([self.x1, self.psi2, self.psi1], 2, 0)
        expected = Tensor.of([self.one, self.psi2, self.one]).scale(-1)
        self.assertEqual(result, expected)

    def test_function_slot(self):
        """Test that a psi-free source slot gives zero."""
        self.assertFalse(tau_st([self.x1, self.x1, self.x2], 0, 1))

    def test_bad_slots(self):
        """Test slot index validation."""
        with self.assertRaises(AlgebraError):
            tau_st([self.x1, self.x2], 0, 0)
        with self.assertRaises(AlgebraError):
            tau_st([self.x1, self.x2], 0, 2)


class SchoutenTest(SimpleTestCase):
    """Test cases for the Schouten bracket."""

    def setUp(self):
        self.space = Space(2, truncation=6)
        self.x1, self.x2 = self.space.x(1), self.space.x(2)
        self.psi1, self.psi2 = self.space.psi(1), self.space.psi(2)

    def test_generators(self):
        """Test that [psi1, x1] is 1."""
        self.assertEqual(schouten(self.psi1, self.x1), self.space.one())

    def test_vector_field_on_function(self):
        """Test that a vector field acts on a function by derivation."""
        field = self.x2 * self.psi1 + self.x1 * self.x1 * self.psi2
        f = self.x1 * self.x2
        expected = parse_polyvector("x2^2 + x1^3", self.space)
        self.assertEqual(schouten(field, f), expected)

    def test_functions(self):
        """Test that two functions have zero bracket."""
        self.assertFalse(schouten(self.x1 * self.x2, self.x1))

    def test_symmetry(self):
        """Test graded symmetry of the bracket on random inputs."""
        space = Space(3, truncation=6)
        rng = np.random.default_rng(11)
        for degrees in ((0, 1), (1, 1), (1, 2), (2, 2), (0, 3)):
            a = random_polyvector(space, rng, degrees[0])
            b = random_polyvector(space, rng, degrees[1])
            sign = -1 if (degrees[0] * degrees[1]) % 2 else 1
            self.assertEqual(schouten(b, a), schouten(a, b).scale(sign))

    def test_jacobi(self):
        """Test the graded Jacobi identity on random homogeneous inputs."""
        space = Space(3, truncation=6)
        rng = np.random.default_rng(2024)
        for degrees in ((1, 1, 1), (2, 1, 0), (2, 2, 1), (1, 2, 3), (2, 2, 2), (0, 1, 2)):
            a, b, c = (random_polyvector(space, rng, d) for d in degrees)
            da, db, dc = degrees
            total = (
                schouten(schouten(a, b), c)
                + schouten(schouten(a, c), b).scale((-1) ** (db * dc))
                + schouten(schouten(b, c), a).scale((-1) ** (da * (db + dc)))
            )
            self.assertFalse(total, degrees)

    def test_leibniz(self):
        """Test the Leibniz rule in the second argument."""
        space = Space(3, truncation=6)
        rng = np.random.default_rng(99)
        for degrees in ((1, 1, 1), (2, 1, 0), (2, 2, 1), (1, 0, 2), (3, 1, 1)):
            a, b, c = (random_polyvector(space, rng, d) for d in degrees)
            da, db, _ = degrees
            right = schouten(a, b) * c + (b * schouten(a, c)).scale((-1) ** ((da - 1) * db))
            self.assertEqual(schouten(a, b * c), right, degrees)


class ProjectionTest(SimpleTestCase):
    """Test cases for the projection onto functions."""

    def test_projection(self):
        """Test that monomials with a psi are killed."""
        space = Space(2, truncation=6)
        self.assertEqual(project_to_O(parse_polyvector("x1 + psi1", space)), space.x(1))
        self.assertFalse(project_to_O(parse_polyvector("psi1*psi2*x1", space)))
        f = parse_polyvector("x1^2 - 1/3*x2", space)
        self.assertEqual(project_to_O(f), f)


class TextFormatTest(SimpleTestCase):
    """Test cases for the polyvector text format."""

    def setUp(self):
        self.space = Space(2, truncation=6)

    def test_canonical_text(self):
        """Test that canonical text prints back unchanged."""
        for text in ("-psi2 + 3/2*x1^2*psi1", "1 + x1", "-x1*psi1*psi2", "0"):
            self.assertEqual(str(parse_polyvector(text, self.space)), text)

    def test_written_order(self):
        """Test that factors multiply in the written order."""
        self.assertEqual(
            parse_polyvector("psi2*psi1", self.space),
            -parse_polyvector("psi1*psi2", self.space),
        )
        self.assertEqual(parse_polyvector("ψ1·x1", self.space), parse_polyvector("x1*psi1", self.space))
        self.assertEqual(parse_polyvector("−x2", self.space), -self.space.x(2))

    def test_rejects_garbage(self):
        """Test that unknown factors are rejected."""
        for text in ("y1", "x3", "x1+", "", "1/0"):
            with self.assertRaises(AlgebraError):
                parse_polyvector(text, self.space)


class PhiTest(SimpleTestCase):
    """Test cases for graph operators."""

    def setUp(self):
        self.space = Space(2, truncation=6)
        self.x1, self.x2 = self.space.x(1), self.space.x(2)
        self.psi1, self.psi2 = self.space.psi(1), self.space.psi(2)

    def test_edgeless_is_product(self):
        """Test that the edgeless collinear graph is the wedge product."""
        graph = DirectedGraph(VertexSet.standard(Flavor.CF_C, 0, 2), ())
        a, b = self.psi1 * self.x1, self.psi2 + self.x2
        self.assertEqual(phi(graph, self.space)(a, b), a * b)

    def test_one_edge(self):
        """Test the single-edge operator on psi1 and x1."""
        graph = c_graph((1, 2), [(1, 2)])
        self.assertEqual(phi(graph, self.space)(self.psi1, self.x1), self.space.one())

    def test_edge_order(self):
        """Test that swapping two edges flips the operator's sign."""
        graph = c_graph((1, 2, 3), [(1, 2), (1, 3)])
        swapped = graph.with_edges([(1, 3), (1, 2)])
        inputs = (self.psi1 * self.psi2, self.x1, self.x2)
        value = phi(graph, self.space)(*inputs)
        self.assertEqual(value, self.space.one())
        self.assertEqual(phi(swapped, self.space)(*inputs), -value)

    def test_bracket_from_two_edges(self):
        """Test that the two one-edge operators add up to the bracket."""
        space = Space(3, truncation=6)
        forward = phi(c_graph((1, 2), [(1, 2)]), space)
        backward = phi(c_graph((1, 2), [(2, 1)]), space)
        rng = np.random.default_rng(5)
        for degrees in ((1, 0), (1, 1), (2, 1), (2, 3), (0, 2)):
            a, b = (random_polyvector(space, rng, d) for d in degrees)
            self.assertEqual(forward(a, b) + backward(a, b), schouten(a, b))

    def test_operad_compatibility(self):
        """Test that inserting a graph matches composing the operators."""
        space = Space(3, truncation=6)
        rng = np.random.default_rng(17)
        g1 = c_graph(("v", 3), [("v", 3)])
        for g2 in (c_graph((1, 2), [(1, 2)]), c_graph((1, 2), [(2, 1)])):
            composed = operad_compose(g1, "v", g2)
            for _ in range(3):
                a1, a2, a3 = (random_polyvector(space, rng, d) for d in (2, 0, 2))
                expected = phi(g1, space)(phi(g2, space)(a1, a2), a3)
                self.assertEqual(phi_sum(composed, {1: a1, 2: a2, 3: a3}, space), expected)

    def test_halfplane_projection(self):
        """Test that half-plane operators project and type their boundary slots."""
        graph = DirectedGraph(VertexSet.standard(Flavor.CF_H, 1, 0, 1), [(1, "b1")])
        operator = phi(graph, self.space)
        field = self.x2 * self.psi1 * self.psi2
        self.assertFalse(operator(field, self.x1))
        vector = self.x2 * self.psi1
        self.assertEqual(operator(vector, self.x1), self.x2)
        with self.assertRaises(SlotTypeError):
            operator(vector, self.psi1)

    def test_bind(self):
        """Test that binding leading inputs leaves the remaining slots."""
        graph = c_graph((1, 2), [(1, 2)])
        bound = phi(graph, self.space).bind(self.psi1)
        self.assertEqual(bound.arity, 1)
        self.assertEqual(bound(self.x1 * self.x1), self.x1.scale(2))
        self.assertEqual(bound.scale(Fraction(1, 2))(self.x1), self.space.one().scale(Fraction(1, 2)))


class SamplingTest(SimpleTestCase):
    """Test cases for random polyvectors."""

    def test_seeded(self):
        """Test that equal seeds give equal polyvectors."""
        space = Space(3, truncation=6)
        first = random_polyvector(space, np.random.default_rng(3), 2)
        second = random_polyvector(space, np.random.default_rng(3), 2)
        self.assertEqual(first, second)
        self.assertEqual(list(first.psi_degree_parts()), [2])
