"""
Numerical weights: the integral of the wedge of edge angle forms of a graph
over the open top stratum of its configuration space.

Strata of dimension at most two are integrated by tensor Gauss-Legendre
quadrature; higher ones by Monte Carlo with one Philox stream per worker,
spawned from the master seed. Partial sums are reduced in worker order, so
an estimate is bit-stable for a fixed (graph, slice, samples, seed, workers).
"""
import logging
import math
import multiprocessing
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from django.conf import settings

from apps.core.exceptions import DegreeMismatchError, SingularConfigurationError, WorkbenchError
from apps.graphs.structures import Flavor

from .angles import COINCIDENCE, d_angle_halfplane, d_angle_plane
from .slices import GaugeSlice

logger = logging.getLogger(__name__)

METHODS = ("auto", "quadrature", "monte-carlo")
QUADRATURE_DIMENSION = 2


@dataclass(frozen=True)
class WeightEstimate:
    value: float
    stderr: float
    samples: int
    seed: int | None
    graph: object
    slice: str = "default"
    workers: int = 1
    method: str = "monte-carlo"
    exact: Fraction | None = field(default=None)

    def agrees_with(self, expected, tolerance):
        """|value - expected| within max(tolerance, 3 stderr)."""
        return abs(self.value - float(expected)) <= max(tolerance, 3 * self.stderr)


@dataclass
class PartialSum:
    """Running sums of one worker."""

    total: float = 0.0
    squares: float = 0.0
    count: int = 0
    redrawn: int = 0

    def add(self, values):
        self.total += float(np.sum(values))
        self.squares += float(np.sum(values * values))
        self.count += len(values)

    def combine_with(self, other):
        self.total += other.total
        self.squares += other.squares
        self.count += other.count
        self.redrawn += other.redrawn

    def mean(self):
        return self.total / self.count

    def stderr(self):
        if self.count < 2:
            return math.inf
        variance = (self.squares - self.total * self.total / self.count) / (self.count - 1)
        return math.sqrt(max(variance, 0.0) / self.count)


def coerce_slice(g, slice=None):
    if isinstance(slice, GaugeSlice):
        if slice.vertices != g.vertices:
            raise WorkbenchError("slice belongs to another vertex set")
        return slice
    return GaugeSlice(g.vertices, slice or "default")


def check_top_degree(g, gauge):
    if g.edge_count != gauge.dimension:
        raise DegreeMismatchError(
            f"{g} has {g.edge_count} edges on a stratum of dimension {gauge.dimension}"
        )


def omega_density(g, u, slice=None):
    """
    Density of the pulled-back form against du_1 ... du_D at box points u
    of shape (N, D), without the chart orientation.
    """
    gauge = coerce_slice(g, slice)
    check_top_degree(g, gauge)
    u = np.atleast_2d(np.asarray(u, dtype=float))
    if gauge.dimension == 0:
        return np.ones(u.shape[0])
    z, tangents = gauge.configuration(u)
    differential = d_angle_halfplane if g.flavor == Flavor.CF_H else d_angle_plane
    rows = []
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for s, t in g.index_edges:
            rows.append(differential(z[:, s], z[:, t], tangents[:, s, :], tangents[:, t, :]))
        jacobian = np.stack(rows, axis=1)
        density = np.linalg.det(jacobian)
    return np.where(_regular(g, z), density, np.nan)


def _regular(g, z):
    regular = np.all(np.isfinite(z), axis=1)
    for s, t in g.index_edges:
        regular &= np.abs(z[:, t] - z[:, s]) > COINCIDENCE
        if g.flavor == Flavor.CF_H:
            regular &= np.abs(z[:, t] - np.conj(z[:, s])) > COINCIDENCE
    return regular


def _gauss_legendre(g, gauge, nodes):
    points, weights = np.polynomial.legendre.leggauss(nodes)
    points = (points + 1) / 2
    weights = weights / 2
    grids = np.meshgrid(*([points] * gauge.dimension), indexing="ij")
    u = np.stack([grid.ravel() for grid in grids], axis=1)
    w = np.ones(len(u))
    for factors in np.meshgrid(*([weights] * gauge.dimension), indexing="ij"):
        w = w * factors.ravel()
    density = omega_density(g, u, gauge)
    if not np.all(np.isfinite(density)):
        raise SingularConfigurationError(f"quadrature hit a singular configuration of {g}")
    return float(np.sum(w * density)), len(u)


def integrate_quadrature(g, gauge, nodes=None):
    nodes = nodes or settings.WORKBENCH_QUADRATURE_MAX_NODES
    fine, evaluations = _gauss_legendre(g, gauge, nodes)
    coarse, _ = _gauss_legendre(g, gauge, max(nodes // 2, 1))
    return gauge.orientation * fine, abs(fine - coarse), evaluations


def split_samples(samples, workers):
    """Deterministic per-worker sample counts."""
    base, extra = divmod(samples, workers)
    return [base + (1 if index < extra else 0) for index in range(workers)]


def monte_carlo_worker(g, slice_name, samples, seed_sequence, batch_size, resample_limit):
    """Accumulate one worker's share of samples from its own Philox stream."""
    gauge = GaugeSlice(g.vertices, slice_name)
    rng = np.random.Generator(np.random.Philox(seed_sequence))
    partial = PartialSum()
    remaining = samples
    while remaining > 0:
        size = min(batch_size, remaining)
        u = rng.random((size, gauge.dimension))
        density = omega_density(g, u, gauge)
        bad = ~np.isfinite(density)
        rounds = 0
        while bad.any():
            if rounds >= resample_limit:
                raise SingularConfigurationError(
                    f"{int(bad.sum())} samples of {g} stayed singular after {resample_limit} redraws"
                )
            partial.redrawn += int(bad.sum())
            u[bad] = rng.random((int(bad.sum()), gauge.dimension))
            density[bad] = omega_density(g, u[bad], gauge)
            bad = ~np.isfinite(density)
            rounds += 1
        partial.add(density)
        remaining -= size
        logger.debug("Worker chunk of %d samples for %s, %d left", size, g, remaining)
    return partial


def integrate_monte_carlo(g, gauge, samples, seed, workers):
    children = np.random.SeedSequence(seed).spawn(workers)
    counts = split_samples(samples, workers)
    args = [
        (
            g,
            gauge.name,
            count,
            child,
            settings.WORKBENCH_BATCH_SIZE,
            settings.WORKBENCH_RESAMPLE_LIMIT,
        )
        for count, child in zip(counts, children, strict=True)
    ]
    if workers > 1:
        with multiprocessing.Pool(processes=workers) as pool:
            partials = pool.starmap(monte_carlo_worker, args)
    else:
        partials = [monte_carlo_worker(*arguments) for arguments in args]
    result = PartialSum()
    for partial in partials:
        result.combine_with(partial)
    if result.redrawn:
        logger.debug("Redrew %d singular samples for %s", result.redrawn, g)
    return gauge.orientation * result.mean(), result.stderr()


def integrate_weight(g, slice=None, samples=None, seed=None, workers=1, method="auto"):
    """Estimate the weight of a top-degree graph over its open stratum."""
    if method not in METHODS:
        raise WorkbenchError(f"unknown integration method {method!r}")
    if workers < 1:
        raise WorkbenchError("workers must be at least 1")
    gauge = coerce_slice(g, slice)
    check_top_degree(g, gauge)
    if gauge.dimension == 0:
        return WeightEstimate(1.0, 0.0, 1, seed, g, gauge.name, workers, "exact", Fraction(1))

    if method == "auto":
        method = "quadrature" if gauge.dimension <= QUADRATURE_DIMENSION else "monte-carlo"
    logger.info("Integrating %s on the %s slice by %s", g, gauge.name, method)
    if method == "quadrature":
        value, stderr, evaluations = integrate_quadrature(g, gauge)
        estimate = WeightEstimate(value, stderr, evaluations, seed, g, gauge.name, workers, method)
    else:
        if samples is None or samples < 2:
            raise WorkbenchError("Monte Carlo integration needs at least 2 samples")
        seed = settings.WORKBENCH_DEFAULT_SEED if seed is None else seed
        value, stderr = integrate_monte_carlo(g, gauge, samples, seed, workers)
        estimate = WeightEstimate(value, stderr, samples, seed, g, gauge.name, workers, method)
    logger.info("Weight of %s: %.6g +- %.2g", g, estimate.value, estimate.stderr)
    return estimate
