import math

from django.conf import settings

from rest_framework import serializers

from dqengine.core.helpers import significant
from dqengine.risk.types import Kind, LevelError, LossSample, RiskLevel, SampleError


class MetricField(serializers.FloatField):
    """Float rounded to the configured significant digits; inf and nan as text."""

    def to_representation(self, value):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return significant(value)


def _metrics(**kwargs):
    return serializers.ListField(child=MetricField(), **kwargs)


class DqReportSerializer(serializers.Serializer):
    dq_ex = MetricField()
    dq_var = MetricField()
    dq_es = MetricField()
    dr = MetricField()
    omega_at_t = MetricField()
    adjusted_level = MetricField(allow_null=True)
    alpha = MetricField(source="alpha.alpha")
    marginal_risks = _metrics()
    aggregate_threshold = MetricField()


class OptimizationResultSerializer(serializers.Serializer):
    labels = serializers.ListField(child=serializers.CharField())
    weights = _metrics(source="weights.values")
    objective = MetricField()
    dq = MetricField()
    status = serializers.CharField(source="status.value")
    converged = serializers.BooleanField()
    iterations = serializers.IntegerField()
    big_m = MetricField(allow_null=True)


class OmegaResultSerializer(serializers.Serializer):
    labels = serializers.ListField(child=serializers.CharField())
    weights = _metrics(source="weights.values")
    omega = MetricField()
    threshold = MetricField()
    status = serializers.CharField(source="status.value")
    iterations = serializers.IntegerField()
    big_m = MetricField(allow_null=True)


class FrontierPointSerializer(serializers.Serializer):
    m = MetricField()
    upside = MetricField()
    ratio = MetricField()
    weights = _metrics(source="weights.values")


class RollingPointSerializer(serializers.Serializer):
    date = serializers.DateField()
    loss_gain = MetricField()
    report = DqReportSerializer()


class PerformanceStatsSerializer(serializers.Serializer):
    AR = MetricField(source="ar")
    AV = MetricField(source="av")
    SR = MetricField(source="sr", allow_null=True)


class BacktestResultSerializer(serializers.Serializer):
    tickers = serializers.ListField(child=serializers.CharField())
    stats = PerformanceStatsSerializer()
    final_wealth = MetricField()
    dates = serializers.ListField(child=serializers.DateField())
    wealth = _metrics()
    weights_history = serializers.SerializerMethodField()
    fallbacks = serializers.ListField(child=serializers.DateField())
    dq_series = RollingPointSerializer(many=True)

    def get_weights_history(self, result) -> list[dict]:
        field = _metrics()
        return [
            {"date": when.isoformat(), "weights": field.to_representation(weights)}
            for when, weights in result.weights_history
        ]


class SimulationSummarySerializer(serializers.Serializer):
    model = serializers.CharField()
    alpha = MetricField()
    size = serializers.IntegerField()
    reps = serializers.IntegerField()
    dq_ex = MetricField()
    dq_var = MetricField()
    dq_es = MetricField()
    closed_form = MetricField(allow_null=True)


class SampleInputSerializer(serializers.Serializer):
    observations = serializers.ListField(
        child=serializers.ListField(child=serializers.FloatField(), allow_empty=False),
        allow_empty=False,
    )
    weights = serializers.ListField(child=serializers.FloatField(), required=False)
    labels = serializers.ListField(child=serializers.CharField(), required=False)
    alpha = serializers.FloatField(default=lambda: settings.DQ_DEFAULT_ALPHA)
    returns = serializers.BooleanField(default=False)

    def validate_observations(self, rows):
        widths = {len(row) for row in rows}
        if len(widths) != 1:
            message = "Every row needs the same number of values."
            raise serializers.ValidationError(message)
        return rows

    def validate_alpha(self, value):
        try:
            RiskLevel(value).require_lower_half()
        except LevelError as exc:
            raise serializers.ValidationError(str(exc)) from exc
        return value

    def validate(self, attrs):
        try:
            sample = LossSample(
                attrs["observations"], attrs.get("weights"), attrs.get("labels", ())
            )
        except SampleError as exc:
            raise serializers.ValidationError({"observations": [str(exc)]}) from exc
        attrs["sample"] = -sample if attrs["returns"] else sample
        return attrs


class ReportInputSerializer(SampleInputSerializer):
    kind = serializers.ChoiceField(
        choices=[kind.value for kind in Kind], default=Kind.EXPECTILE.value
    )


class OptimizeInputSerializer(SampleInputSerializer):
    method = serializers.ChoiceField(choices=["lp", "gradient"], default="lp")
    big_m = serializers.FloatField(required=False, allow_null=True)

    def validate_big_m(self, value):
        if value is not None and not 0 < value < math.inf:
            message = "Big-M bound must be positive and finite."
            raise serializers.ValidationError(message)
        return value
