from django.conf import settings

from dqengine.api.serializers import OmegaResultSerializer, OptimizationResultSerializer
from dqengine.backtest.helpers import load_sample_csv, omega_threshold
from dqengine.backtest.types import Strategy
from dqengine.optimize import constants as methods
from dqengine.optimize import helpers as optimize

from ..base import EngineCommand


class Command(EngineCommand):
    help = "Find the long-only weights with the smallest expectile DQ or best Omega"

    def add_engine_arguments(self, parser):
        self.option(parser, "--input", dest="source", help="scenario CSV")
        self.option(parser, "--alpha", type=float)
        self.option(
            parser,
            "--strategy",
            choices=[Strategy.MIN_DQ_EX.value, Strategy.MAX_OMEGA.value],
        )
        self.option(parser, "--method", choices=methods.METHODS)
        self.option(parser, "--threshold-multiple", type=float)
        self.option(parser, "--big-m", type=float)

    def get_defaults(self):
        return {
            **super().get_defaults(),
            "alpha": settings.DQ_DEFAULT_ALPHA,
            "strategy": Strategy.MIN_DQ_EX.value,
            "method": methods.LP,
            "threshold_multiple": 1.0,
        }

    def run(
        self,
        *,
        source,
        alpha,
        strategy,
        method,
        threshold_multiple,
        big_m,
        returns,
        **_options,
    ):
        sample = load_sample_csv(self.require(source, "input"), returns=returns)
        if strategy == Strategy.MAX_OMEGA:
            threshold = omega_threshold(sample, threshold_multiple)
            result = optimize.max_omega_lp(sample, threshold, big_m)
            return OmegaResultSerializer(result).data
        result = optimize.min_dq_ex(sample, alpha, method, big_m=big_m)
        return OptimizationResultSerializer(result).data
