from rest_framework import serializers

from apps.weights.slices import SLICE_NAMES
from apps.weights.sources import KNOWN_MODES, KnownWeights, MonteCarloWeights

from .relations import RELATIONS

WEIGHT_MODES = ("known", "monte-carlo")


class WeightSourceSerializer(serializers.Serializer):
    """
    Serializer for the weight source options shared by the relation commands.
    """
    weights = serializers.ChoiceField(choices=WEIGHT_MODES, default="known")
    samples = serializers.IntegerField(min_value=2)
    seed = serializers.IntegerField(min_value=0, max_value=2**64 - 1)
    slice = serializers.ChoiceField(choices=SLICE_NAMES, default="default")
    workers = serializers.IntegerField(min_value=1, default=1)
    known = serializers.ChoiceField(choices=KNOWN_MODES, default="all")
    tolerance = serializers.FloatField(min_value=0, required=False, allow_null=True)

    def create(self, validated_data):
        if validated_data["weights"] == "known":
            return KnownWeights()
        return MonteCarloWeights(
            validated_data["samples"],
            seed=validated_data["seed"],
            workers=validated_data["workers"],
            slice_name=validated_data["slice"],
            known=validated_data["known"],
        )


class RelationRequestSerializer(WeightSourceSerializer):
    relation = serializers.ChoiceField(choices=sorted(RELATIONS))
    arity = serializers.IntegerField(min_value=0, required=False, allow_null=True)
    dimension = serializers.IntegerField(min_value=1, max_value=4)
    seeds = serializers.ListField(child=serializers.IntegerField(min_value=0), min_length=1)
    order = serializers.IntegerField(min_value=0, max_value=2, default=1)
    pi = serializers.CharField(required=False, allow_null=True, allow_blank=False)

    def validate(self, attrs):
        if attrs["relation"] == "twisted-mc" and not attrs.get("pi"):
            raise serializers.ValidationError("twisted-mc needs --pi")
        return attrs
