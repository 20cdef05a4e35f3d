"""
Rewriting of tree monomials and the confluence check of critical monomials.

Rules match modulo the declared symmetry of the generators: a pattern node
of an antisymmetric generator also matches the node with its inputs
exchanged, at the cost of a sign. Leaf-order constraints then select the
orientation a rule applies to, so that e.g. the Jacobi rule only rewrites
``[[A,B],C]`` when the smallest leaves of A, B and C increase.
"""
import itertools
import logging
import multiprocessing
from collections import defaultdict
from dataclasses import dataclass, field

from django.conf import settings

from apps.core.exceptions import RewriteBudgetExceeded, WorkbenchError

from .trees import (
    LEFTMOST_INNERMOST,
    STRATEGIES,
    Combination,
    Leaf,
    Node,
    label,
    node_positions,
    reading_order,
    replace,
    substitute,
    subtree,
)

logger = logging.getLogger(__name__)

CONFLUENT = "CONFLUENT"
NOT_CONFLUENT = "NOT_CONFLUENT"
INDETERMINATE = "INDETERMINATE"


@dataclass(frozen=True)
class Redex:
    position: tuple
    rule: object
    bindings: tuple
    sign: int
    covers: frozenset

    def describe(self, presentation):
        return {
            "position": list(self.position),
            "rule": self.rule.name,
            "sign": self.sign,
            "bindings": {str(leaf): presentation.format(tree) for leaf, tree in self.bindings},
        }


def _match(presentation, pattern, tree, position):
    """All (bindings, sign, covered positions) matching ``pattern`` at ``tree``."""
    if isinstance(pattern, Leaf):
        if presentation.color(tree) != pattern.color:
            return []
        return [({pattern: tree}, 1, ())]
    if not isinstance(tree, Node) or tree.generator != pattern.generator:
        return []
    orientations = [((0, 1), 1)]
    swap = presentation.generators[tree.generator].swap_sign
    if swap is not None:
        orientations.append(((1, 0), swap))
    found = []
    for order, sign in orientations:
        options = [
            _match(presentation, pattern.children[i], tree.children[j], (*position, j))
            for i, j in enumerate(order)
        ]
        for combination in itertools.product(*options):
            bindings = {}
            total = sign
            covered = [position]
            for part, part_sign, part_covered in combination:
                bindings.update(part)
                total *= part_sign
                covered.extend(part_covered)
            found.append((bindings, total, tuple(covered)))
    return found


def _ordered(presentation, rule, bindings):
    keys = [presentation.min_leaf(bindings[leaf]) for leaf in rule.leaf_order]
    return all(a < b for a, b in zip(keys, keys[1:], strict=False))


def iter_redexes(presentation, tree, strategy=LEFTMOST_INNERMOST):
    """Redexes in the order a strategy visits positions; rules in file order at each position."""
    for position in node_positions(tree, strategy):
        target = subtree(tree, position)
        for rule in presentation.rules:
            for bindings, sign, covered in _match(presentation, rule.left, target, position):
                if _ordered(presentation, rule, bindings):
                    yield Redex(position, rule, tuple(bindings.items()), sign, frozenset(covered))


def redexes(presentation, tree, strategy=LEFTMOST_INNERMOST):
    return list(iter_redexes(presentation, tree, strategy))


def apply_redex(presentation, tree, redex):
    """Terms of ``tree`` rewritten at ``redex``, uncollected, as (tree, coefficient) pairs."""
    bindings = dict(redex.bindings)
    terms = []
    for right, coefficient in redex.rule.right:
        term, sign = presentation.normalize(substitute(right, bindings))
        terms.append((replace(tree, redex.position, term), coefficient * redex.sign * sign))
    return terms


def rewrite_step(tree, presentation, strategy=LEFTMOST_INNERMOST):
    """One rewrite at the first redex, or None for a normal form."""
    redex = next(iter_redexes(presentation, tree, strategy), None)
    if redex is None:
        return None
    return Combination(apply_redex(presentation, tree, redex))


def parallel_step(combination, presentation, strategy=LEFTMOST_INNERMOST):
    """Rewrite every reducible term once; returns the uncollected terms and the number of rewrites."""
    terms = []
    rewrites = 0
    for tree, coefficient in combination.items():
        redex = next(iter_redexes(presentation, tree, strategy), None)
        if redex is None:
            terms.append((tree, coefficient))
            continue
        rewrites += 1
        terms.extend((new, coefficient * c) for new, c in apply_redex(presentation, tree, redex))
    return terms, rewrites


@dataclass
class Trace:
    """Lines of a derivation; each line keeps its terms uncollected."""

    start: object
    strategy: str
    lines: list = field(default_factory=list)
    result: Combination = field(default_factory=Combination)
    steps: int = 0
    first: Redex | None = None

    def describe(self, presentation):
        return {
            "start": presentation.format(self.start),
            "strategy": self.strategy,
            "first": self.first.describe(presentation) if self.first else None,
            "lines": [presentation.format_terms(line) for line in self.lines],
            "normal_form": presentation.format_terms(self.result.items()),
            "steps": self.steps,
        }


def rewrite_trace(presentation, tree, first=None, strategy=LEFTMOST_INNERMOST, budget=None):
    """
    Rewrite ``tree`` to its normal form.

    ``first`` picks the opening redex by its index among the leftmost-innermost
    redexes of the normalized tree; every later line rewrites each term once
    with ``strategy``. Raises RewriteBudgetExceeded past ``budget`` rewrites.
    """
    budget = settings.WORKBENCH_REWRITE_BUDGET if budget is None else budget
    if budget <= 0:
        raise WorkbenchError("the rewrite step budget must be positive")
    tree, sign = presentation.normalize(tree)
    trace = Trace(tree, strategy)
    if first is not None:
        found = redexes(presentation, tree)
        if not 0 <= first < len(found):
            raise WorkbenchError(f"{presentation.format(tree)} has {len(found)} redexes, not {first + 1}")
        trace.first = found[first]
        terms = [(new, sign * c) for new, c in apply_redex(presentation, tree, trace.first)]
        trace.lines.append(terms)
        trace.steps = 1
        current = Combination(terms)
    else:
        current = Combination.of(tree, sign)
    while True:
        terms, rewrites = parallel_step(current, presentation, strategy)
        if not rewrites:
            break
        trace.steps += rewrites
        if trace.steps > budget:
            raise RewriteBudgetExceeded(budget)
        trace.lines.append(terms)
        current = Combination(terms)
    trace.result = current
    return trace


def normal_form(tree, presentation, step_budget=None, strategy=LEFTMOST_INNERMOST):
    return rewrite_trace(presentation, tree, strategy=strategy, budget=step_budget).result


@dataclass
class CriticalMonomial:
    tree: object
    redexes: list

    def describe(self, presentation):
        return {
            "monomial": presentation.format(self.tree),
            "redexes": [redex.describe(presentation) for redex in self.redexes],
        }


def _shapes(presentation, color, weight):
    """Unlabeled trees with ``weight`` generators and output ``color``; leaves are numbered 0."""
    if weight == 0:
        yield Leaf(color, 0)
        return
    for generator in presentation.generators.values():
        if generator.output != color:
            continue
        left_color, right_color = generator.inputs
        for split in range(weight):
            for left in _shapes(presentation, left_color, split):
                for right in _shapes(presentation, right_color, weight - 1 - split):
                    yield Node(generator.name, (left, right))


def _labelings(presentation, shape):
    counts = defaultdict(int)
    for leaf in shape.leaves():
        counts[leaf.color] += 1
    colors = sorted(counts, key=presentation.color_index.get)
    for orders in itertools.product(*(itertools.permutations(range(1, counts[c] + 1)) for c in colors)):
        numbers = {color: iter(order) for color, order in zip(colors, orders, strict=True)}
        yield label(shape, numbers)


def _is_critical(tree, found):
    """Two distinct redexes that together cover every generator of the tree."""
    everything = frozenset(node_positions(tree))
    return any(a.covers | b.covers == everything for a, b in itertools.combinations(found, 2))


def critical_monomials(presentation):
    """
    Overlaps of two left sides, one per tree shape up to relabeling.

    Every labeling of every tree with three generators is normalized and
    searched for two redexes covering it; a shape is represented by its
    reading-order labeling when that one is critical.
    """
    groups = {}
    seen = set()
    for color in presentation.colors:
        for shape in _shapes(presentation, color, 3):
            for labeled in _labelings(presentation, shape):
                tree, _ = presentation.normalize(labeled)
                if tree in seen:
                    continue
                seen.add(tree)
                found = redexes(presentation, tree)
                if _is_critical(tree, found):
                    groups.setdefault(reading_order(tree), []).append(CriticalMonomial(tree, found))
    monomials = []
    for key, candidates in groups.items():
        preferred = [candidate for candidate in candidates if candidate.tree == key]
        if preferred:
            monomials.append(preferred[0])
        else:
            monomials.append(min(candidates, key=lambda candidate: presentation.format(candidate.tree)))
    monomials.sort(key=lambda m: (presentation.color_index[presentation.color(m.tree)], presentation.format(m.tree)))
    logger.info("Presentation %s has %d critical monomials", presentation.name, len(monomials))
    return monomials


@dataclass
class ConfluenceResult:
    monomial: CriticalMonomial
    traces: dict
    status: str
    strategies: dict
    reason: str = ""

    @property
    def confluent(self):
        return self.status == CONFLUENT

    def normal_forms(self, strategy=LEFTMOST_INNERMOST):
        return [trace.result for trace in self.traces.get(strategy, [])]

    def describe(self, presentation):
        return {
            **self.monomial.describe(presentation),
            "status": self.status,
            "strategies": self.strategies,
            "reason": self.reason,
            "paths": {
                strategy: [trace.describe(presentation) for trace in traces]
                for strategy, traces in self.traces.items()
            },
        }


def _verdict(results):
    first = results[0]
    return CONFLUENT if all(result == first for result in results[1:]) else NOT_CONFLUENT


def check_monomial(presentation, monomial, budget, strategies=STRATEGIES):
    """Rewrite a critical monomial from each of its redexes under each strategy."""
    traces = {}
    verdicts = {}
    try:
        for strategy in strategies:
            traces[strategy] = [
                rewrite_trace(presentation, monomial.tree, index, strategy, budget)
                for index in range(len(monomial.redexes))
            ]
            verdicts[strategy] = _verdict([trace.result for trace in traces[strategy]])
    except RewriteBudgetExceeded as exc:
        logger.warning("Confluence of %s undecided: %s", presentation.format(monomial.tree), exc)
        return ConfluenceResult(monomial, traces, INDETERMINATE, verdicts, str(exc))
    results = [trace.result for strategy in strategies for trace in traces[strategy]]
    return ConfluenceResult(monomial, traces, _verdict(results), verdicts)


@dataclass
class ConfluenceReport:
    presentation: object
    results: list
    budget: int

    @property
    def passed(self):
        return all(result.confluent for result in self.results)

    @property
    def counts(self):
        counts = {CONFLUENT: 0, NOT_CONFLUENT: 0, INDETERMINATE: 0}
        for result in self.results:
            counts[result.status] += 1
        return counts

    def result(self, text):
        """The result for a critical monomial given in the presentation's notation."""
        tree, _ = self.presentation.normalize(self.presentation.parse(text))
        for result in self.results:
            if result.monomial.tree == tree:
                return result
        raise KeyError(text)

    def describe(self):
        return {
            "presentation": self.presentation.describe(),
            "budget": self.budget,
            "critical_monomials": len(self.results),
            "counts": self.counts,
            "status": "PASS" if self.passed else "FAIL",
            "results": [result.describe(self.presentation) for result in self.results],
        }


def check_confluence(presentation, budget=None, strategies=STRATEGIES, workers=1):
    """Confluence of every critical monomial; the checks run in ``workers`` processes."""
    budget = settings.WORKBENCH_REWRITE_BUDGET if budget is None else budget
    if budget <= 0:
        raise WorkbenchError("the rewrite step budget must be positive")
    if workers < 1:
        raise WorkbenchError("workers must be at least 1")
    monomials = critical_monomials(presentation)
    args = [(presentation, monomial, budget, tuple(strategies)) for monomial in monomials]
    if workers > 1 and len(args) > 1:
        with multiprocessing.Pool(processes=min(workers, len(args))) as pool:
            results = pool.starmap(check_monomial, args)
    else:
        results = [check_monomial(*arguments) for arguments in args]
    report = ConfluenceReport(presentation, results, budget)
    logger.info("Confluence of %s: %s", presentation.name, report.counts)
    return report
