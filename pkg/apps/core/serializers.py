from fractions import Fraction

from rest_framework import serializers


class FractionField(serializers.Field):
    """
    Exact rational given as an integer or a string such as "-1/2".
    """

    default_error_messages = {
        "invalid": "Expected an integer or a rational such as \"1/2\".",
    }

    def to_internal_value(self, data):
        if isinstance(data, bool) or not isinstance(data, (int, str)):
            self.fail("invalid")
        try:
            return Fraction(data)
        except (ValueError, ZeroDivisionError):
            self.fail("invalid")

    def to_representation(self, value):
        return value.numerator if value.denominator == 1 else str(value)
