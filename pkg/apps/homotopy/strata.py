"""
Codimension-one boundary strata of the compactified configuration spaces.

Each stratum is a product (outer space) x (inner space) obtained when the
inner vertices collide. Its sign compares the boundary orientation induced
by the open stratum (outward normal first) with the product orientation
(inner factor first, then outer), both measured through the gauge slices of
the weights app. Stokes identities then read

    sum over strata of sign * eps * w(outer graph) * w(inner graph) = 0

where eps is the sign of moving the inner edges in front of the others.
"""
import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from apps.core.exceptions import SliceError
from apps.graphs.cooperad import Splitting, splittings
from apps.graphs.structures import Flavor, VertexSet
from apps.weights.slices import GaugeSlice, generic_point

logger = logging.getLogger(__name__)

# Distance scale of the colliding cluster when measuring orientations.
COLLISION_SCALE = 1e-3

SUBSET_NAMES = {
    "C": ("S",),
    "I": ("I",),
    "ST": ("S", "T"),
    "PQ": ("P", "Q"),
    "STU": ("S", "T", "U"),
}


@dataclass(frozen=True)
class BoundaryTerm:
    splitting: Splitting
    subsets: tuple
    sign: int

    @property
    def kind(self):
        return self.splitting.kind

    @property
    def inner(self):
        return self.splitting.inner

    @property
    def outer(self):
        return self.splitting.outer

    def describe(self):
        return {
            "kind": self.kind,
            "subsets": {name: [str(label) for label in labels] for name, labels in self.subsets},
            "inner": self.inner.describe(),
            "outer": self.outer.describe(),
            "sign": self.sign,
        }


def subset_data(splitting):
    """The colliding labels of a splitting grouped as in the boundary formulas."""
    inner = splitting.inner
    names = SUBSET_NAMES[splitting.kind]
    if splitting.kind in ("C", "I"):
        groups = (inner.free,)
    elif splitting.kind in ("ST", "PQ"):
        groups = (inner.free, inner.collinear)
    else:
        groups = (inner.free, inner.collinear, inner.boundary)
    return tuple(zip(names, groups, strict=True))


def _lift(vertices, splitting, outer, inner, outer_values, inner_values, scale):
    """Top configuration (or tangent) with the inner cluster at ``scale`` around the new vertex."""
    index = vertices.index
    vector = np.zeros(len(index), dtype=complex)
    for label in outer.vertices.labels:
        if label != splitting.label:
            vector[index[label]] = outer_values[outer.vertices.index[label]]
    anchor = outer_values[outer.vertices.index[splitting.label]]
    for label in inner.vertices.labels:
        vector[index[label]] = anchor + scale * inner_values[inner.vertices.index[label]]
    return vector


def boundary_sign(vertices, splitting, scale=COLLISION_SCALE):
    """Induced orientation of the stratum against the product orientation, +1 or -1."""
    top = GaugeSlice(vertices)
    inner = GaugeSlice(splitting.inner)
    outer = GaugeSlice(splitting.outer)
    for attempt in range(8):
        zi, ti = inner.configuration(generic_point(inner.dimension, attempt)[None, :])
        zo, to = outer.configuration(generic_point(outer.dimension, attempt + 1)[None, :])
        zi, ti, zo, to = zi[0], ti[0], zo[0], to[0]
        resting = np.zeros_like(zo)
        still = np.zeros_like(zi)

        base = _lift(vertices, splitting, outer, inner, zo, zi, scale)
        rows = top.generators(base)
        # outward normal: the cluster shrinks
        rows.append(-top.ambient(_lift(vertices, splitting, outer, inner, resting, zi, 1.0)))
        rows += [
            top.ambient(_lift(vertices, splitting, outer, inner, resting, ti[:, j], scale))
            for j in range(inner.dimension)
        ]
        rows += [
            top.ambient(_lift(vertices, splitting, outer, inner, to[:, j], still, 0.0))
            for j in range(outer.dimension)
        ]
        matrix = np.array(rows)
        matrix = matrix / np.linalg.norm(matrix, axis=1, keepdims=True)
        determinant = np.linalg.det(matrix)
        if abs(determinant) > 1e-10:
            sign = 1 if determinant > 0 else -1
            return sign * inner.orientation * outer.orientation
    raise SliceError(f"cannot orient the {splitting.kind} stratum of {vertices}")


@lru_cache(maxsize=256)
def _strata(vertices):
    terms = []
    for splitting in splittings(vertices):
        terms.append(BoundaryTerm(splitting, subset_data(splitting), boundary_sign(vertices, splitting)))
    logger.debug("%d boundary strata of %s", len(terms), vertices)
    return tuple(terms)


def boundary_strata(flavor, labels=None, **shape):
    """
    All codimension-one strata of a configuration space.

    ``labels`` is a VertexSet; alternatively pass the flavor with ``free``,
    ``collinear`` and ``boundary`` counts.
    """
    if isinstance(flavor, VertexSet):
        vertices = flavor
    elif isinstance(labels, VertexSet):
        vertices = labels
    else:
        vertices = VertexSet.standard(Flavor(flavor), **shape)
    if not vertices.is_defined():
        raise SliceError(f"no configuration space for {vertices}")
    return list(_strata(vertices))
