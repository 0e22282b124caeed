from django.conf import settings

from dqengine.api.serializers import SimulationSummarySerializer
from dqengine.parametric import constants as defaults
from dqengine.parametric import helpers as parametric
from dqengine.parametric.types import (
    EquicorrelatedNormal,
    IidPareto,
    IidT,
    MultivariateT,
    parse_model,
)

from ..base import EngineCommand, floats

CORRELATED = (EquicorrelatedNormal.name, MultivariateT.name)


class Command(EngineCommand):
    help = "Average sample DQ values over repeated draws from a synthetic model"

    sign_flags = False

    def add_engine_arguments(self, parser):
        self.option(
            parser,
            "--model",
            choices=[*CORRELATED, IidT.name, IidPareto.name],
        )
        self.option(parser, "--alpha", type=float)
        self.option(parser, "--n", type=int, help="number of assets")
        self.option(parser, "--r", type=floats, help="comma-separated correlations")
        self.option(parser, "--nu", type=float, help="Student-t degrees of freedom")
        self.option(parser, "--gamma", type=float, help="Pareto tail index")
        self.option(parser, "--reps", type=int)
        self.option(parser, "--size", type=int, help="rows per sample")

    def get_defaults(self):
        return {
            **super().get_defaults(),
            "model": EquicorrelatedNormal.name,
            "alpha": settings.DQ_DEFAULT_ALPHA,
            "n": 5,
            "r": [0.0, 0.2, 0.4, 0.6, 0.8],
            "nu": 3.0,
            "gamma": 3.0,
            "reps": defaults.SIMULATION_REPS,
            "size": defaults.SIMULATION_SIZE,
        }

    def run(self, *, model, alpha, n, r, nu, gamma, reps, size, seed, **_options):
        correlations = r if model in CORRELATED else [None]
        results = []
        for correlation in correlations:
            generator = parse_model(
                model, n=n, r=correlation or 0.0, nu=nu, gamma=gamma
            )
            summary = parametric.simulate(
                generator, alpha, size=size, reps=reps, seed=seed
            )
            results.append(
                {"r": correlation, **SimulationSummarySerializer(summary).data}
            )
        return {"model": model, "n": n, "seed": seed, "results": results}
