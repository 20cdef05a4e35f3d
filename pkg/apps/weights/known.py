"""
Exactly known weights of top-degree graphs.
"""
import logging
import math
from fractions import Fraction

from apps.graphs.structures import Flavor, permutation_sign

logger = logging.getLogger(__name__)


def _groups(g):
    group_of = g.vertices.group_of
    return [(group_of(s), group_of(t)) for s, t in g.edges]


def has_opposite_edges(g):
    edges = set(g.edges)
    return any((t, s) in edges for s, t in g.edges)


def has_collinear_edge(g):
    return any(groups == ("collinear", "collinear") for groups in _groups(g))


def _star_sign(g, targets):
    """Sign of the edge permutation that sorts the edges by their endpoint in ``targets``."""
    order = {label: position for position, label in enumerate(targets)}
    return permutation_sign([order[t] if t in order else order[s] for s, t in g.edges])


def _star(g, centre, targets):
    """True when the edges run from ``centre`` to pairwise distinct ``targets``."""
    if any(s != centre or t not in targets for s, t in g.edges):
        return False
    return len({t for _, t in g.edges}) == len(g.edges)


def _plane_weight(g):
    vertices = g.vertices
    if vertices.flavor == Flavor.C:
        return Fraction(1) if len(vertices.free) == 2 else Fraction(0)
    p, q = vertices.shape
    if has_collinear_edge(g):
        return Fraction(0)
    if (p + q) % 2:
        return Fraction(0)
    if q == 1:
        return Fraction(1) if p == 1 else Fraction(0)
    if q == 2:
        return Fraction(0)
    if (p, q) == (1, 3):
        return Fraction(_star_sign(g, vertices.collinear), 24)
    return None


def _halfplane_weight(g):
    vertices = g.vertices
    if any(source == "boundary" for source, _ in _groups(g)):
        return Fraction(0)
    k, m, n = vertices.shape
    if (k, m) == (1, 0) and _star(g, vertices.free[0], vertices.boundary):
        return Fraction(_star_sign(g, vertices.boundary), math.factorial(n))
    if (k, m) == (0, 1) and _star(g, vertices.collinear[0], vertices.boundary):
        return Fraction(_star_sign(g, vertices.boundary), math.factorial(n))
    return None


def known_weight(g):
    """The exact weight of ``g`` when it is determined in closed form, else None."""
    vertices = g.vertices
    if not vertices.is_defined() or g.edge_count != vertices.dimension:
        return None
    if g.edge_count == 0:
        return Fraction(1)
    if g.flavor != Flavor.CF_H and has_opposite_edges(g):
        return Fraction(0)
    if g.flavor == Flavor.CF_H:
        return _halfplane_weight(g)
    return _plane_weight(g)
