from django.db import models

from apps.core.models import TimeStampedModel


class WeightCacheEntry(TimeStampedModel):
    """
    A stored numerical weight. Entries are only ever inserted; a key
    (structure, slice, samples, seed, workers) determines its estimate.
    """
    structure_hash = models.CharField(max_length=64, db_index=True)
    graph = models.JSONField()
    slice = models.CharField(max_length=32)
    samples = models.PositiveBigIntegerField()
    seed = models.BigIntegerField(null=True, blank=True)
    workers = models.PositiveIntegerField(default=1)
    method = models.CharField(max_length=16)
    value = models.FloatField()
    stderr = models.FloatField()

    class Meta:
        verbose_name = 'Weight cache entry'
        verbose_name_plural = 'Weight cache entries'
        ordering = ['created']
        unique_together = ['structure_hash', 'slice', 'samples', 'seed', 'workers']

    def __str__(self):
        return f"{self.structure_hash[:12]} {self.slice} n={self.samples}: {self.value:.6g}"
