from rest_framework import serializers

from apps.graphs.serializers import GraphSerializer

from .integration import METHODS
from .slices import SLICE_NAMES


class WeightEstimateSerializer(serializers.Serializer):
    """
    Serializer for the weight report.
    """
    graph = GraphSerializer()
    value = serializers.FloatField()
    stderr = serializers.FloatField()
    samples = serializers.IntegerField()
    seed = serializers.IntegerField(allow_null=True)
    slice = serializers.CharField()
    workers = serializers.IntegerField()
    method = serializers.CharField()
    exact = serializers.SerializerMethodField()

    def get_exact(self, obj):
        return None if obj.exact is None else str(obj.exact)


class WeightRequestSerializer(serializers.Serializer):
    samples = serializers.IntegerField(min_value=2)
    seed = serializers.IntegerField(min_value=0, max_value=2**64 - 1)
    slice = serializers.ChoiceField(choices=SLICE_NAMES, default="default")
    workers = serializers.IntegerField(min_value=1, default=1)
    method = serializers.ChoiceField(choices=METHODS, default="auto")
    tolerance = serializers.FloatField(min_value=0)
