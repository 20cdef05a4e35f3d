"""
Gauge slices: charts from a box (0, 1)^D onto representatives of the open
stratum of a configuration space modulo its symmetry group.

Plane flavors (C, CF_C) are taken modulo translations and positive
dilations; the collinear points of CF_C lie on the real axis. The half-plane
flavor (CF_H) is taken modulo horizontal translations and dilations; the
boundary is the real axis and collinear points share a height h > 0.

Each chart is affine in the substituted coordinates except for at most one
anchor on the unit circle. Unbounded coordinates are substituted from the
unit interval and the derivative of the substitution is folded into the
tangent vectors, so densities are always taken against du_1 ... du_D.

The orientation of a chart is the sign of det[symmetry generators; chart
tangents] in the ambient coordinates (Re, Im of each free point, the
collinear abscissae, the collinear height, the boundary abscissae).
"""
import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from apps.core.exceptions import SliceError
from apps.graphs.structures import Flavor

logger = logging.getLogger(__name__)

SLICE_NAMES = ("default", "alternate", "mirrored", "mirrored-alternate")

# Substitutions u -> t with their derivative dt/du.
SUBSTITUTIONS = {
    "line": (
        lambda u: np.tan(np.pi * (u - 0.5)),
        lambda u: np.pi / np.cos(np.pi * (u - 0.5)) ** 2,
    ),
    "ray": (lambda u: u / (1.0 - u), lambda u: 1.0 / (1.0 - u) ** 2),
    "angle": (lambda u: 2 * np.pi * u, lambda u: np.full_like(u, 2 * np.pi)),
    "half-angle": (lambda u: np.pi * u, lambda u: np.full_like(u, np.pi)),
}

GOLDEN = 0.6180339887498949


def generic_point(dimension, attempt=0):
    """A deterministic chart point away from the faces of the box."""
    u = np.mod(0.5 + GOLDEN * (np.arange(dimension) + 1 + attempt * dimension) + 0.01 * attempt, 1.0)
    return np.clip(u, 0.05, 0.95)


class ChartBuilder:
    """Accumulates an affine chart vertex by vertex."""

    def __init__(self, size):
        self.offset = np.zeros(size, dtype=complex)
        self.columns = []
        self.kinds = []
        self.circles = {}

    def coordinate(self, kind):
        self.kinds.append(kind)
        self.columns.append(np.zeros(len(self.offset), dtype=complex))
        return len(self.kinds) - 1

    def fix(self, v, value):
        self.offset[v] = value

    def add(self, v, j, coefficient):
        self.columns[j][v] += coefficient

    def free_point(self, v, upper=False):
        self.add(v, self.coordinate("line"), 1)
        self.add(v, self.coordinate("ray" if upper else "line"), 1j)

    def circle(self, v, kind="angle"):
        self.circles[v] = self.coordinate(kind)

    def follow(self, v, previous, step):
        """Place v at previous + step * gap, with a new gap coordinate."""
        self.offset[v] = self.offset[previous]
        for column in self.columns:
            column[v] = column[previous]
        self.add(v, self.coordinate("ray"), step)

    def chain(self, vertices, step):
        for previous, v in zip(vertices, vertices[1:], strict=False):
            self.follow(v, previous, step)

    def build(self):
        matrix = np.array(self.columns).T if self.columns else np.zeros((len(self.offset), 0), complex)
        return Chart(self.offset.copy(), matrix, tuple(self.kinds), dict(self.circles))


@dataclass(frozen=True)
class Chart:
    offset: np.ndarray
    matrix: np.ndarray
    kinds: tuple
    circles: dict

    @property
    def dimension(self):
        return len(self.kinds)

    def evaluate(self, u):
        """Positions (N, V) and tangents dz/du (N, V, D) at box points u (N, D)."""
        u = np.asarray(u, dtype=float)
        count = u.shape[0]
        t = np.empty_like(u)
        dt = np.empty_like(u)
        for j, kind in enumerate(self.kinds):
            substitute, derivative = SUBSTITUTIONS[kind]
            t[:, j] = substitute(u[:, j])
            dt[:, j] = derivative(u[:, j])
        z = np.broadcast_to(self.offset, (count, len(self.offset))).astype(complex)
        z = z + t @ self.matrix.T
        tangents = np.broadcast_to(self.matrix, (count,) + self.matrix.shape).astype(complex)
        tangents = tangents * dt[:, None, :]
        for v, j in self.circles.items():
            point = np.exp(1j * t[:, j])
            z[:, v] += point
            tangents[:, v, j] = 1j * point * dt[:, j]
        return z, tangents


def _plane_chart(vertices, reverse):
    index = vertices.index
    builder = ChartBuilder(len(vertices))
    free = [index[label] for label in vertices.free]
    collinear = [index[label] for label in vertices.collinear]
    step = 1
    if reverse:
        free.reverse()
        collinear.reverse()
        step = -1
    if vertices.flavor == Flavor.C:
        builder.fix(free[0], 0)
        builder.circle(free[1])
        rest = free[2:]
    else:
        builder.fix(collinear[0], 0)
        if len(collinear) >= 2:
            builder.fix(collinear[1], step)
            builder.chain(collinear[1:], step)
            rest = free
        else:
            builder.circle(free[0])
            rest = free[1:]
    for v in rest:
        builder.free_point(v)
    return builder.build()


def _halfplane_chart(vertices, reverse):
    index = vertices.index
    builder = ChartBuilder(len(vertices))
    free = [index[label] for label in vertices.free]
    collinear = [index[label] for label in vertices.collinear]
    boundary = [index[label] for label in vertices.boundary]
    step = 1
    if reverse:
        free.reverse()
        collinear.reverse()
        boundary.reverse()
        step = -1
    rest = free
    if len(boundary) >= 2:
        builder.fix(boundary[0], 0)
        builder.fix(boundary[1], step)
        builder.chain(boundary[1:], step)
        if collinear:
            height = builder.coordinate("ray")
            builder.add(collinear[0], builder.coordinate("line"), 1)
            for v in collinear:
                builder.add(v, height, 1j)
    elif collinear:
        if boundary and not reverse:
            builder.fix(boundary[0], 0)
            builder.add(collinear[0], builder.coordinate("line"), 1)
            builder.offset[collinear[0]] += 1j
        else:
            builder.fix(collinear[0], 1j)
            if boundary:
                builder.add(boundary[0], builder.coordinate("line"), 1)
    elif boundary and not reverse:
        builder.fix(boundary[0], 0)
        builder.circle(free[0], "half-angle")
        rest = free[1:]
    else:
        builder.fix(free[0], 1j)
        rest = free[1:]
        if boundary:
            builder.add(boundary[0], builder.coordinate("line"), 1)
    if collinear:
        builder.chain(collinear, step)
    for v in rest:
        builder.free_point(v, upper=True)
    return builder.build()


@dataclass(frozen=True)
class GaugeSlice:
    """A named chart of the open stratum of ``vertices``."""

    vertices: object
    name: str = "default"

    def __post_init__(self):
        if self.name not in SLICE_NAMES:
            raise SliceError(f"unknown slice {self.name!r}; expected one of {', '.join(SLICE_NAMES)}")
        if not self.vertices.is_defined():
            raise SliceError(f"no configuration space for {self.vertices}")
        if self.mirrored and self.vertices.flavor == Flavor.CF_H:
            raise SliceError("mirrored slices exist for plane flavors only")

    @property
    def flavor(self):
        return self.vertices.flavor

    @property
    def mirrored(self):
        return self.name.startswith("mirrored")

    @property
    def halfplane(self):
        return self.vertices.flavor == Flavor.CF_H

    @cached_property
    def chart(self):
        reverse = self.name.endswith("alternate")
        if self.halfplane:
            chart = _halfplane_chart(self.vertices, reverse)
        else:
            chart = _plane_chart(self.vertices, reverse)
        if chart.dimension != self.vertices.dimension:
            raise SliceError(
                f"chart of {self.vertices} has {chart.dimension} coordinates, "
                f"expected {self.vertices.dimension}"
            )
        return chart

    @property
    def dimension(self):
        return self.vertices.dimension

    def configuration(self, u):
        z, tangents = self.chart.evaluate(u)
        if self.mirrored:
            return np.conj(z), np.conj(tangents)
        return z, tangents

    def ambient(self, z):
        """Ambient real coordinates of configurations z (..., V)."""
        index = self.vertices.index
        parts = []
        for label in self.vertices.free:
            parts += [np.real(z[..., index[label]]), np.imag(z[..., index[label]])]
        for label in self.vertices.collinear:
            parts.append(np.real(z[..., index[label]]))
        if self.vertices.collinear:
            parts.append(np.imag(z[..., index[self.vertices.collinear[0]]]))
        for label in self.vertices.boundary:
            parts.append(np.real(z[..., index[label]]))
        return np.stack(parts, axis=-1)

    def generators(self, z):
        """Infinitesimal symmetries at a configuration z (V,), as ambient rows."""
        vertices = self.vertices
        shift_x = np.zeros(len(self.ambient(z)))
        shift_y = np.zeros_like(shift_x)
        position = 0
        for _ in vertices.free:
            shift_x[position] = 1
            shift_y[position + 1] = 1
            position += 2
        for _ in vertices.collinear:
            shift_x[position] = 1
            position += 1
        if vertices.collinear:
            shift_y[position] = 1
            position += 1
        for _ in vertices.boundary:
            shift_x[position] = 1
            position += 1
        dilation = self.ambient(z)
        if self.halfplane:
            return [shift_x, dilation]
        return [shift_x, shift_y, dilation]

    @cached_property
    def orientation(self):
        """+1 or -1: orientation of the chart against the ambient orientation."""
        dimension = self.dimension
        for attempt in range(8):
            u = generic_point(dimension, attempt)[None, :]
            z, tangents = self.configuration(u)
            rows = self.generators(z[0])
            rows += [self.ambient(tangents[0, :, j]) for j in range(dimension)]
            determinant = np.linalg.det(np.array(rows))
            if abs(determinant) > 1e-9:
                return 1 if determinant > 0 else -1
        raise SliceError(f"cannot orient the {self.name} slice of {self.vertices}")

    def __str__(self):
        return f"{self.name}:{self.vertices}"
