"""
ORM-backed weight cache.

Weights depend on a graph only through its label-free structure, so
entries are keyed by a hash of (flavor, shape, edges as vertex indices)
together with the integration parameters.
"""
import hashlib
import json
import logging

from django.db import DatabaseError, IntegrityError, transaction

from .integration import WeightEstimate
from .models import WeightCacheEntry

logger = logging.getLogger(__name__)


def structure_key(g):
    return (str(g.flavor), tuple(g.vertices.shape), tuple(g.index_edges))


def structure_hash(g):
    flavor, shape, edges = structure_key(g)
    payload = json.dumps([flavor, list(shape), [list(edge) for edge in edges]], separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def lookup(g, slice_name, samples, seed, workers):
    """The cached estimate for ``g``, or None."""
    try:
        entry = WeightCacheEntry.objects.filter(
            structure_hash=structure_hash(g),
            slice=slice_name,
            samples=samples,
            seed=seed,
            workers=workers,
        ).first()
    except DatabaseError as exc:
        logger.warning("Weight cache unavailable: %s", exc)
        return None
    if entry is None:
        return None
    logger.debug("Weight cache hit for %s", g)
    return WeightEstimate(
        entry.value, entry.stderr, entry.samples, entry.seed, g, entry.slice, entry.workers, entry.method
    )


def store(estimate):
    """Insert an estimate; existing entries are never overwritten."""
    g = estimate.graph
    try:
        with transaction.atomic():
            WeightCacheEntry.objects.create(
                structure_hash=structure_hash(g),
                graph=g.describe(),
                slice=estimate.slice,
                samples=estimate.samples,
                seed=estimate.seed,
                workers=estimate.workers,
                method=estimate.method,
                value=estimate.value,
                stderr=estimate.stderr,
            )
    except IntegrityError:
        logger.debug("Weight of %s already cached", g)
        return False
    except DatabaseError as exc:
        logger.warning("Could not cache the weight of %s: %s", g, exc)
        return False
    return True
