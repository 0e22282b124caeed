from django.conf import settings

from dqengine.api.serializers import FrontierPointSerializer, MetricField
from dqengine.backtest.helpers import load_sample_csv
from dqengine.optimize import helpers as optimize

from ..base import EngineCommand


class Command(EngineCommand):
    help = "Trace the upside-versus-cushion frontier of the expectile DQ problem"

    def add_engine_arguments(self, parser):
        self.option(parser, "--input", dest="source", help="scenario CSV")
        self.option(parser, "--alpha", type=float)

    def get_defaults(self):
        return {**super().get_defaults(), "alpha": settings.DQ_DEFAULT_ALPHA}

    def run(self, *, source, alpha, returns, **_options):
        sample = load_sample_csv(self.require(source, "input"), returns=returns)
        best, frontier = optimize.min_dq_ex_frontier(sample, alpha)
        dq = best.ratio / (alpha * (2 * best.ratio + 1))
        return {
            "labels": list(sample.labels),
            "best": {
                **FrontierPointSerializer(best).data,
                "dq": MetricField().to_representation(dq),
            },
            "points": FrontierPointSerializer(frontier, many=True).data,
        }
