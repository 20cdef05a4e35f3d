from rest_framework import serializers

from apps.core.exceptions import GraphValidationError

from .structures import DirectedGraph, Flavor, VertexSet


class LabelField(serializers.Field):
    """
    Vertex label: an integer or a non-empty string.
    """

    default_error_messages = {
        "invalid": "Vertex labels must be integers or non-empty strings.",
    }

    def to_internal_value(self, data):
        if isinstance(data, bool) or not isinstance(data, (int, str)) or data == "":
            self.fail("invalid")
        return data

    def to_representation(self, value):
        return value


class GraphSerializer(serializers.Serializer):
    """
    Serializer for the graph JSON format.

    Edges keep their stored order; validated data carries the DirectedGraph
    under the "graph" key.
    """
    flavor = serializers.ChoiceField(choices=[flavor.value for flavor in Flavor])
    free = serializers.ListField(child=LabelField(), required=False, default=list)
    collinear = serializers.ListField(child=LabelField(), required=False, default=list)
    boundary = serializers.ListField(child=LabelField(), required=False, default=list)
    edges = serializers.ListField(
        child=serializers.ListField(child=LabelField(), min_length=2, max_length=2),
        required=False,
        default=list,
    )

    def validate(self, attrs):
        try:
            vertices = VertexSet(
                attrs["flavor"], attrs["free"], attrs["collinear"], attrs["boundary"]
            )
            attrs["graph"] = DirectedGraph(vertices, tuple(map(tuple, attrs["edges"])))
        except GraphValidationError as exc:
            raise serializers.ValidationError(str(exc)) from exc
        return attrs

    def to_representation(self, instance):
        return instance.describe()


def load_graph(data):
    serializer = GraphSerializer(data=data)
    serializer.is_valid(raise_exception=True)
    return serializer.validated_data["graph"]
