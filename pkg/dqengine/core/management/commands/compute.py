from django.conf import settings

from dqengine.api.serializers import DqReportSerializer
from dqengine.backtest.helpers import load_sample_csv
from dqengine.dq import helpers as dq

from ... import constants
from ..base import EngineCommand


class Command(EngineCommand):
    help = "Compute the diversification report of a scenario CSV"

    def add_engine_arguments(self, parser):
        self.option(parser, "--input", dest="source", help="scenario CSV")
        self.option(parser, "--alpha", type=float)
        self.option(parser, "--measure", choices=constants.MEASURES)

    def get_defaults(self):
        return {
            **super().get_defaults(),
            "alpha": settings.DQ_DEFAULT_ALPHA,
            "measure": constants.MEASURES[0],
        }

    def run(self, *, source, alpha, measure, returns, **_options):
        sample = load_sample_csv(self.require(source, "input"), returns=returns)
        report = dq.report(sample, alpha, measure)
        return DqReportSerializer(report).data
