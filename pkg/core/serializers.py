import math

from rest_framework import serializers

from .conf import sandwichlab_setting

COMMANDS = (
    "catalog-list", "verify", "order", "class", "collect", "commutator",
    "sandwich-check", "strong-sandwich-check", "engel-check", "lemma-replay",
    "lie-check", "vstar", "type", "export", "definitions",
)

FORMATS = ("json", "text")

VERDICTS = ("pass", "sampled-pass", "fail", "inconclusive", "precondition-failed")


def _prime_power(n: int) -> tuple[int, int] | None:
    base = next((d for d in range(2, math.isqrt(n) + 1) if n % d == 0), n)
    exp = 0
    while n % base == 0:
        n //= base
        exp += 1
    return (base, exp) if n == 1 else None


class OrderField(serializers.Field):
    """Порядок группы: {"base": 2, "exp": 28}, "infinite" или число, если это не степень простого."""

    def to_representation(self, value):
        if value == math.inf:
            return "infinite"
        value = int(value)
        if value == 1:
            return {"base": 1, "exp": 0}
        pp = _prime_power(value)
        if pp is None:
            return value
        return {"base": pp[0], "exp": pp[1]}

    def to_internal_value(self, data):
        if data == "infinite":
            return math.inf
        if isinstance(data, dict):
            try:
                return int(data["base"]) ** int(data["exp"])
            except (KeyError, TypeError, ValueError):
                raise serializers.ValidationError("order must be {'base': b, 'exp': e}")
        if isinstance(data, int) and data >= 1:
            return data
        raise serializers.ValidationError("order must be a positive integer, a prime power or 'infinite'")


class RunConfigSerializer(serializers.Serializer):
    command = serializers.ChoiceField(choices=COMMANDS)
    target = serializers.CharField(required=False, allow_blank=True, default="")
    seed = serializers.IntegerField(required=False, allow_null=True, min_value=0, max_value=2 ** 64 - 1)
    samples = serializers.IntegerField(required=False, allow_null=True, min_value=1)
    max_word_length = serializers.IntegerField(required=False, allow_null=True, min_value=1)
    fuel = serializers.IntegerField(required=False, allow_null=True, min_value=1)
    max_class = serializers.IntegerField(required=False, allow_null=True, min_value=1)
    mode = serializers.ChoiceField(choices=("sampled", "exhaustive"), required=False, default="sampled")
    format = serializers.ChoiceField(choices=FORMATS, required=False, default="text")

    def validate(self, attrs):
        # пропущенные значения берём из settings.SANDWICHLAB
        for name in ("seed", "samples", "max_word_length", "fuel", "max_class"):
            if attrs.get(name) is None:
                attrs[name] = sandwichlab_setting(name.upper())
        return attrs


class FieldResultSerializer(serializers.Serializer):
    computed = serializers.JSONField(allow_null=True)
    expected = serializers.JSONField(allow_null=True)
    provenance = serializers.CharField(allow_null=True)
    ok = serializers.BooleanField(allow_null=True)
    error = serializers.CharField(allow_null=True, required=False)

    def to_representation(self, instance):
        data = super().to_representation(instance)
        if instance.name == "order":
            data["computed"] = OrderField().to_representation(instance.computed) if instance.computed else None
            data["expected"] = OrderField().to_representation(instance.expected)
        if data.get("error") is None:
            data.pop("error", None)
        return data


class VerdictReportSerializer(serializers.Serializer):
    check = serializers.CharField()
    verdict = serializers.ChoiceField(choices=VERDICTS)
    mode = serializers.CharField()
    samples = serializers.IntegerField()
    seed = serializers.IntegerField()
    counterexample = serializers.CharField(allow_null=True)
    details = serializers.JSONField()


class ReplayResultSerializer(serializers.Serializer):
    suite = serializers.CharField()
    expression = serializers.CharField()
    expected = serializers.CharField()
    computed = serializers.CharField()
    provenance = serializers.CharField()
    ok = serializers.BooleanField()


class ReportSerializer(serializers.Serializer):
    """Документ, который печатает CLI в режиме --format json."""

    tool_version = serializers.CharField()
    command = serializers.CharField()
    target = serializers.CharField(allow_blank=True)
    seed = serializers.IntegerField()
    verdict = serializers.ChoiceField(choices=VERDICTS)
    fields = serializers.JSONField()
    counterexamples = serializers.ListField(child=serializers.CharField())
