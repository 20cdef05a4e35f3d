"""
Tree monomials of a colored operad and signed linear combinations of them.

A tree monomial is a planar rooted tree. Internal vertices carry generator
names and leaves carry a color and a number, so the leaf ``a2`` has color
``a`` and number 2. Positions are tuples of child indices from the root.
"""
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from itertools import count

from apps.core.exceptions import WorkbenchError

Position = tuple[int, ...]

LEFTMOST_INNERMOST = "leftmost-innermost"
RIGHTMOST_OUTERMOST = "rightmost-outermost"
STRATEGIES = (LEFTMOST_INNERMOST, RIGHTMOST_OUTERMOST)


@dataclass(frozen=True)
class Leaf:
    color: str
    number: int

    @property
    def weight(self):
        return 0

    def leaves(self):
        yield self

    def __str__(self):
        return f"{self.color}{self.number}"


@dataclass(frozen=True)
class Node:
    generator: str
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))

    @property
    def weight(self):
        """Number of generators in the tree."""
        return 1 + sum(child.weight for child in self.children)

    def leaves(self):
        for child in self.children:
            yield from child.leaves()


Tree = Leaf | Node


def subtree(tree, position):
    for index in position:
        tree = tree.children[index]
    return tree


def replace(tree, position, new):
    if not position:
        return new
    head, rest = position[0], position[1:]
    children = list(tree.children)
    children[head] = replace(children[head], rest, new)
    return Node(tree.generator, children)


def node_positions(tree, strategy=LEFTMOST_INNERMOST):
    """
    Positions of the generators in the order a strategy visits them.

    Leftmost-innermost is the post-order with children left to right;
    rightmost-outermost is the pre-order with children right to left.
    """
    if isinstance(tree, Leaf):
        return []
    if strategy == LEFTMOST_INNERMOST:
        found = []
        for index, child in enumerate(tree.children):
            found.extend((index, *position) for position in node_positions(child, strategy))
        found.append(())
        return found
    if strategy == RIGHTMOST_OUTERMOST:
        found = [()]
        for index in reversed(range(len(tree.children))):
            child = tree.children[index]
            found.extend((index, *position) for position in node_positions(child, strategy))
        return found
    raise WorkbenchError(f"unknown strategy {strategy!r}")


def substitute(tree, bindings):
    """Replace every leaf found in ``bindings`` by the bound tree."""
    if isinstance(tree, Leaf):
        return bindings.get(tree, tree)
    return Node(tree.generator, [substitute(child, bindings) for child in tree.children])


def label(tree, numbers):
    """Number the leaves in reading order, drawing from one iterator per color."""
    if isinstance(tree, Leaf):
        return Leaf(tree.color, next(numbers[tree.color]))
    return Node(tree.generator, [label(child, numbers) for child in tree.children])


def reading_order(tree):
    """The same tree with each color's leaves renumbered 1, 2, .. from left to right."""
    return label(tree, defaultdict(lambda: count(1)))


class Combination:
    """Sum of tree monomials with rational coefficients, in order of first appearance."""

    def __init__(self, terms=()):
        self.terms = {}
        for tree, coefficient in terms:
            self.add(tree, coefficient)

    @classmethod
    def of(cls, tree, coefficient=1):
        return cls([(tree, coefficient)])

    def add(self, tree, coefficient):
        value = self.terms.get(tree, Fraction(0)) + Fraction(coefficient)
        if value:
            self.terms[tree] = value
        else:
            self.terms.pop(tree, None)

    def items(self):
        return list(self.terms.items())

    def __iter__(self):
        return iter(self.terms)

    def __len__(self):
        return len(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, Combination):
            return NotImplemented
        return self.terms == other.terms

    def __repr__(self):
        return f"Combination({self.items()!r})"


def format_terms(terms, render):
    """Text such as ``x1•(x2•a1) - x2•(x1•a1)``; ``terms`` are (tree, coefficient) pairs."""
    pieces = []
    for tree, coefficient in terms:
        coefficient = Fraction(coefficient)
        magnitude = abs(coefficient)
        body = render(tree) if magnitude == 1 else f"{magnitude}*{render(tree)}"
        if not pieces:
            pieces.append(f"-{body}" if coefficient < 0 else body)
        else:
            pieces.append(f"- {body}" if coefficient < 0 else f"+ {body}")
    return " ".join(pieces) or "0"
