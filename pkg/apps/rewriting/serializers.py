from rest_framework import serializers

from apps.core.exceptions import PresentationError
from apps.core.serializers import FractionField

from .presentations import NOTATIONS, SYMMETRIES, presentation_from_data


class GeneratorSerializer(serializers.Serializer):
    name = serializers.CharField()
    inputs = serializers.ListField(child=serializers.CharField(), min_length=2, max_length=2)
    output = serializers.CharField()
    degree = serializers.IntegerField(default=0)
    symmetry = serializers.ChoiceField(choices=list(SYMMETRIES), default="none")
    notation = serializers.ChoiceField(choices=NOTATIONS, default="juxtapose")
    symbol = serializers.CharField(required=False, default="", allow_blank=True)


class TermSerializer(serializers.Serializer):
    coefficient = FractionField()
    tree = serializers.CharField()


class RuleSerializer(serializers.Serializer):
    name = serializers.CharField()
    left = serializers.CharField()
    right = TermSerializer(many=True)
    leaf_order = serializers.ListField(child=serializers.CharField(), required=False, default=list)


class PresentationSerializer(serializers.Serializer):
    """
    Serializer for the presentation JSON format.

    Trees are written in the presentation's own notation; validated data
    carries the built Presentation under the "presentation" key.
    """
    name = serializers.CharField(required=False, default="custom")
    description = serializers.CharField(required=False, default="", allow_blank=True)
    colors = serializers.ListField(child=serializers.CharField(), min_length=1)
    generators = GeneratorSerializer(many=True)
    rules = RuleSerializer(many=True)

    def validate(self, attrs):
        try:
            attrs["presentation"] = presentation_from_data(attrs)
        except PresentationError as exc:
            raise serializers.ValidationError(str(exc)) from exc
        return attrs

    def to_representation(self, instance):
        return instance.describe()


def load_presentation(data):
    serializer = PresentationSerializer(data=data)
    serializer.is_valid(raise_exception=True)
    return serializer.validated_data["presentation"]
