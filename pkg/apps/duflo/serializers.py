from rest_framework import serializers

from apps.core.exceptions import LieAlgebraError
from apps.core.serializers import FractionField
from apps.weights.sources import KNOWN_MODES

from .lie import LieAlgebra
from .star import MAX_ORDER


class BracketSerializer(serializers.Serializer):
    """One structure constant: [e_i, e_j] contains c e_k."""
    i = serializers.IntegerField(min_value=1)
    j = serializers.IntegerField(min_value=1)
    k = serializers.IntegerField(min_value=1)
    c = FractionField()


class LieAlgebraSerializer(serializers.Serializer):
    """
    Serializer for the Lie algebra JSON format: either a bracket list with
    a dimension or a full n x n x n ``constants`` array.
    """
    name = serializers.CharField(required=False, default="custom")
    dimension = serializers.IntegerField(min_value=1, required=False)
    brackets = BracketSerializer(many=True, required=False)
    constants = serializers.ListField(
        child=serializers.ListField(child=serializers.ListField(child=FractionField())),
        required=False,
    )

    def validate(self, attrs):
        try:
            if "constants" in attrs:
                attrs["algebra"] = LieAlgebra.from_array(attrs["name"], attrs["constants"])
            elif "dimension" in attrs:
                brackets = {}
                for entry in attrs.get("brackets", []):
                    brackets.setdefault((entry["i"], entry["j"]), {})[entry["k"]] = entry["c"]
                attrs["algebra"] = LieAlgebra.from_brackets(attrs["name"], attrs["dimension"], brackets)
            else:
                raise serializers.ValidationError("give either constants or a dimension with brackets")
        except LieAlgebraError as exc:
            raise serializers.ValidationError(str(exc)) from exc
        return attrs

    def to_representation(self, instance):
        return instance.describe()


class StarRequestSerializer(serializers.Serializer):
    order = serializers.IntegerField(min_value=0, max_value=MAX_ORDER)
    max_degree = serializers.IntegerField(min_value=1, max_value=3)
    samples = serializers.IntegerField(min_value=2)
    seed = serializers.IntegerField(min_value=0, max_value=2**64 - 1)
    workers = serializers.IntegerField(min_value=1, default=1)
    known = serializers.ChoiceField(choices=KNOWN_MODES, default="all")


def load_lie_algebra_json(data):
    serializer = LieAlgebraSerializer(data=data)
    serializer.is_valid(raise_exception=True)
    return serializer.validated_data["algebra"]
