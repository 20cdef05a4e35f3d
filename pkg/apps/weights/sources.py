"""
Weight sources used by the relation checks and the star product.

A source maps a top-degree graph to a WeightEstimate; ``weight(g)`` returns
the exact Fraction when there is one and the float estimate otherwise.
"""
import dataclasses
import logging
from fractions import Fraction

from django.conf import settings

from apps.core.exceptions import MissingWeightError

from . import cache
from .integration import WeightEstimate, integrate_weight
from .known import known_weight

logger = logging.getLogger(__name__)

KNOWN_MODES = ("all", "zeros", "none")


def exact_estimate(g, value):
    return WeightEstimate(float(value), 0.0, 0, None, g, "default", 1, "known", Fraction(value))


class WeightSource:
    name = "weights"

    def estimate(self, g):
        raise NotImplementedError

    def weight(self, g):
        estimate = self.estimate(g)
        return estimate.exact if estimate.exact is not None else estimate.value

    def stderr(self, g):
        return self.estimate(g).stderr

    def __call__(self, g):
        return self.weight(g)


class KnownWeights(WeightSource):
    """Closed-form weights only."""

    name = "known"

    def estimate(self, g):
        value = known_weight(g)
        if value is None:
            raise MissingWeightError(g, "not in the known-weight table")
        return exact_estimate(g, value)


class MonteCarloWeights(WeightSource):
    """
    Numerical weights with an in-process memo and the ORM cache.

    ``known`` selects which closed-form values short-cut the integration:
    all of them, only the vanishing ones, or none.
    """

    name = "monte-carlo"

    def __init__(self, samples, seed=None, workers=1, slice_name="default", known="all", use_cache=True):
        if known not in KNOWN_MODES:
            raise ValueError(f"known must be one of {KNOWN_MODES}")
        self.samples = samples
        self.seed = settings.WORKBENCH_DEFAULT_SEED if seed is None else seed
        self.workers = workers
        self.slice_name = slice_name
        self.known = known
        self.use_cache = use_cache
        self._memo = {}

    def _known(self, g):
        if self.known == "none":
            return None
        value = known_weight(g)
        if value is None or (self.known == "zeros" and value != 0):
            return None
        return value

    def estimate(self, g):
        value = self._known(g)
        if value is not None:
            return exact_estimate(g, value)
        key = cache.structure_key(g)
        if key in self._memo:
            return dataclasses.replace(self._memo[key], graph=g)
        estimate = None
        if self.use_cache:
            estimate = cache.lookup(g, self.slice_name, self.samples, self.seed, self.workers)
        if estimate is None:
            estimate = integrate_weight(g, self.slice_name, self.samples, self.seed, self.workers)
            if self.use_cache and estimate.method == "monte-carlo":
                cache.store(estimate)
        self._memo[key] = estimate
        return dataclasses.replace(estimate, graph=g)


class CorruptedWeights(WeightSource):
    """Another source with the weight of one graph shifted by ``delta``."""

    name = "corrupted"

    def __init__(self, base, graph, delta):
        self.base = base
        self.key = cache.structure_key(graph)
        self.delta = Fraction(delta)

    def estimate(self, g):
        estimate = self.base.estimate(g)
        if cache.structure_key(g) != self.key:
            return estimate
        exact = None if estimate.exact is None else estimate.exact + self.delta
        return dataclasses.replace(estimate, value=estimate.value + float(self.delta), exact=exact)
