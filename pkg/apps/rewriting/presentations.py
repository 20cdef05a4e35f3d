"""
Quadratic presentations of colored operads by binary generators and
rewriting rules, with the infix notation used to read and print tree
monomials: ``[x1,x2]`` for brackets, ``x1•a1`` for infix operations and
juxtaposition ``(a1a2)a3`` for products.
"""
import json
import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from apps.core.exceptions import PresentationError

from .trees import Leaf, Node, format_terms

logger = logging.getLogger(__name__)

PRESETS_DIR = Path(__file__).resolve().parent / "presets"
PRESETS = ("ncg", "ncg1", "assoc")

SYMMETRIES = {"none": None, "symmetric": 1, "antisymmetric": -1}
NOTATIONS = ("bracket", "juxtapose", "infix")

LEAF = re.compile(r"([A-Za-z]+)(\d+)")
TOKEN = re.compile(r"\s*(?:(?P<leaf>[A-Za-z]+\d+)|(?P<punct>[()\[\],])|(?P<symbol>\S))")
CLOSERS = (None, ")", "]", ",")


@dataclass(frozen=True)
class Generator:
    name: str
    inputs: tuple
    output: str
    degree: int = 0
    symmetry: str = "none"
    notation: str = "juxtapose"
    symbol: str = ""

    @property
    def swap_sign(self):
        """Sign picked up by exchanging the two inputs, or None when they do not commute."""
        return SYMMETRIES[self.symmetry]

    def describe(self):
        return {
            "name": self.name,
            "inputs": list(self.inputs),
            "output": self.output,
            "degree": self.degree,
            "symmetry": self.symmetry,
            "notation": self.notation,
            "symbol": self.symbol,
        }


@dataclass(frozen=True)
class Rule:
    """``left`` rewrites to the sum of ``right`` terms; leaves of ``left`` are pattern variables."""

    name: str
    left: Node
    right: tuple
    leaf_order: tuple = ()


@dataclass
class Presentation:
    name: str
    colors: tuple
    generators: dict = field(default_factory=dict)
    rules: list = field(default_factory=list)
    description: str = ""

    def __post_init__(self):
        self.colors = tuple(self.colors)
        if not self.colors or len(set(self.colors)) != len(self.colors):
            raise PresentationError("colors must be a non-empty list of distinct names")
        for color in self.colors:
            if not re.fullmatch(r"[A-Za-z]+", color):
                raise PresentationError(f"color names are letters only, got {color!r}")
        self.color_index = {color: index for index, color in enumerate(self.colors)}

    def add_generator(self, generator):
        if generator.name in self.generators:
            raise PresentationError(f"generator {generator.name!r} declared twice")
        if len(generator.inputs) != 2:
            raise PresentationError(f"generator {generator.name!r} is not binary")
        for color in (*generator.inputs, generator.output):
            if color not in self.color_index:
                raise PresentationError(f"generator {generator.name!r} uses unknown color {color!r}")
        if generator.symmetry not in SYMMETRIES:
            raise PresentationError(f"unknown symmetry {generator.symmetry!r}")
        if generator.swap_sign is not None and generator.inputs[0] != generator.inputs[1]:
            raise PresentationError(f"generator {generator.name!r} exchanges inputs of different colors")
        if generator.notation not in NOTATIONS:
            raise PresentationError(f"unknown notation {generator.notation!r}")
        if generator.notation == "infix" and not generator.symbol:
            raise PresentationError(f"infix generator {generator.name!r} needs a symbol")
        for other in self.generators.values():
            if (other.notation, other.symbol, other.inputs) == (generator.notation, generator.symbol, generator.inputs):
                raise PresentationError(f"generators {other.name!r} and {generator.name!r} print alike")
        self.generators[generator.name] = generator

    def add_rule(self, name, left, right, leaf_order=()):
        """Parse and check one rule; ``right`` is a list of (coefficient, text) pairs."""
        left_tree = self.parse(left)
        if left_tree.weight != 2:
            raise PresentationError(f"rule {name!r}: the left side must have two generators")
        variables = set(left_tree.leaves())
        terms = []
        for coefficient, text in right:
            tree = self.parse(text)
            if set(tree.leaves()) != variables:
                raise PresentationError(f"rule {name!r}: {text!r} does not use the leaves of {left!r}")
            if self.color(tree) != self.color(left_tree):
                raise PresentationError(f"rule {name!r}: {text!r} has another output color")
            if self.degree(tree) != self.degree(left_tree):
                raise PresentationError(f"rule {name!r}: {text!r} has another degree")
            try:
                coefficient = Fraction(coefficient)
            except (TypeError, ValueError, ZeroDivisionError) as exc:
                raise PresentationError(f"rule {name!r}: invalid coefficient {coefficient!r}") from exc
            if coefficient:
                terms.append((tree, coefficient))
        order = tuple(self.parse(text) for text in leaf_order)
        if any(leaf not in variables for leaf in order):
            raise PresentationError(f"rule {name!r}: leaf order names unknown leaves")
        rule = Rule(name, left_tree, tuple(terms), order)
        self.rules.append(rule)
        return rule

    def color(self, tree):
        if isinstance(tree, Leaf):
            return tree.color
        return self.generators[tree.generator].output

    def degree(self, tree):
        if isinstance(tree, Leaf):
            return 0
        return self.generators[tree.generator].degree + sum(self.degree(child) for child in tree.children)

    def leaf_key(self, leaf):
        return (self.color_index[leaf.color], leaf.number)

    def min_leaf(self, tree):
        return min(self.leaf_key(leaf) for leaf in tree.leaves())

    def normalize(self, tree):
        """
        Order the inputs of every commuting generator by their smallest leaf.

        Returns the normalized tree and the sign collected on the way.
        """
        if isinstance(tree, Leaf):
            return tree, 1
        sign = 1
        children = []
        for child in tree.children:
            child, child_sign = self.normalize(child)
            children.append(child)
            sign *= child_sign
        swap = self.generators[tree.generator].swap_sign
        if swap is not None and self.min_leaf(children[1]) < self.min_leaf(children[0]):
            children.reverse()
            sign *= swap
        return Node(tree.generator, children), sign

    def parse(self, text):
        """Read a tree monomial written in this presentation's notation."""
        tree = _Parser(self, text).parse()
        leaves = list(tree.leaves())
        if len(set(leaves)) != len(leaves):
            raise PresentationError(f"leaf labels repeat in {text!r}")
        return tree

    def format(self, tree):
        if isinstance(tree, Leaf):
            return str(tree)
        generator = self.generators[tree.generator]
        left, right = tree.children
        if generator.notation == "bracket":
            return f"[{self.format(left)},{self.format(right)}]"
        return f"{self._operand(left)}{generator.symbol}{self._operand(right)}"

    def _operand(self, tree):
        text = self.format(tree)
        if isinstance(tree, Node) and self.generators[tree.generator].notation != "bracket":
            return f"({text})"
        return text

    def format_terms(self, terms):
        return format_terms(terms, self.format)

    def find_generator(self, notation, symbol, inputs):
        for generator in self.generators.values():
            if generator.notation == notation and generator.symbol == symbol and generator.inputs == inputs:
                return generator
        raise PresentationError(f"no {notation} generator {symbol} takes inputs of colors {inputs}")

    def describe(self):
        return {
            "name": self.name,
            "description": self.description,
            "colors": list(self.colors),
            "generators": [generator.describe() for generator in self.generators.values()],
            "rules": [
                {
                    "name": rule.name,
                    "left": self.format(rule.left),
                    "right": self.format_terms(rule.right),
                    "leaf_order": [str(leaf) for leaf in rule.leaf_order],
                }
                for rule in self.rules
            ],
        }


class _Parser:
    """
    Recursive descent over the grammar

        expression := unit [ symbol unit | unit ]
        unit       := leaf | "(" expression ")" | "[" expression "," expression "]"

    so that nested products and infix operations need parentheses.
    """

    def __init__(self, presentation, text):
        self.presentation = presentation
        self.text = text
        self.tokens = []
        position = 0
        text = text.rstrip()
        while position < len(text):
            match = TOKEN.match(text, position)
            if match is None:
                raise PresentationError(f"cannot read {self.text!r}")
            self.tokens.append(match.group(match.lastgroup))
            position = match.end()
        self.index = 0

    def parse(self):
        if not self.tokens:
            raise PresentationError("empty tree monomial")
        tree = self.expression()
        if self.peek() is not None:
            raise PresentationError(f"unexpected {self.peek()!r} in {self.text!r}")
        return tree

    def peek(self):
        return self.tokens[self.index] if self.index < len(self.tokens) else None

    def take(self, expected=None):
        token = self.peek()
        if token is None or (expected is not None and token != expected):
            raise PresentationError(f"expected {expected or 'more input'!r} in {self.text!r}")
        self.index += 1
        return token

    def expression(self):
        left = self.unit()
        token = self.peek()
        if token in CLOSERS:
            return left
        if token in ("(", "[") or LEAF.fullmatch(token):
            tree = self.combine("juxtapose", "", left, self.unit())
        else:
            self.take()
            tree = self.combine("infix", token, left, self.unit())
        if self.peek() not in CLOSERS:
            raise PresentationError(f"ambiguous expression {self.text!r}; add parentheses")
        return tree

    def unit(self):
        token = self.take()
        if token == "(":
            tree = self.expression()
            self.take(")")
            return tree
        if token == "[":
            left = self.expression()
            self.take(",")
            right = self.expression()
            self.take("]")
            return self.combine("bracket", "", left, right)
        match = LEAF.fullmatch(token)
        if match is None:
            raise PresentationError(f"unexpected {token!r} in {self.text!r}")
        color, number = match.group(1), int(match.group(2))
        if color not in self.presentation.color_index:
            raise PresentationError(f"unknown color {color!r} in {self.text!r}")
        if number < 1:
            raise PresentationError(f"leaf numbers start at 1 in {self.text!r}")
        return Leaf(color, number)

    def combine(self, notation, symbol, left, right):
        inputs = (self.presentation.color(left), self.presentation.color(right))
        generator = self.presentation.find_generator(notation, symbol, inputs)
        return Node(generator.name, (left, right))


def presentation_from_data(data):
    """Build a presentation from the validated JSON document."""
    presentation = Presentation(data["name"], data["colors"], description=data.get("description", ""))
    for entry in data["generators"]:
        presentation.add_generator(Generator(
            entry["name"],
            tuple(entry["inputs"]),
            entry["output"],
            entry.get("degree", 0),
            entry.get("symmetry", "none"),
            entry.get("notation", "juxtapose"),
            entry.get("symbol", ""),
        ))
    for entry in data["rules"]:
        presentation.add_rule(
            entry["name"],
            entry["left"],
            [(term["coefficient"], term["tree"]) for term in entry["right"]],
            entry.get("leaf_order", ()),
        )
    logger.debug(
        "Presentation %s: %d generators, %d rules", presentation.name,
        len(presentation.generators), len(presentation.rules),
    )
    return presentation


def preset(name):
    """One of the shipped presentations."""
    if name not in PRESETS:
        raise PresentationError(f"unknown preset {name!r}; expected one of {', '.join(PRESETS)}")
    with open(PRESETS_DIR / f"{name}.json", encoding="utf-8") as handle:
        return presentation_from_data(json.load(handle))
