import log
from rest_framework.decorators import api_view
from rest_framework.response import Response

from dqengine.dq import helpers as dq
from dqengine.optimize import helpers as optimize
from dqengine.optimize.types import OptimizationError

from .serializers import (
    DqReportSerializer,
    OptimizationResultSerializer,
    OptimizeInputSerializer,
    ReportInputSerializer,
)


@api_view(["POST"])
def report(request):
    serializer = ReportInputSerializer(data=request.data)
    if not serializer.is_valid():
        return Response({"errors": serializer.errors}, 400)

    data = serializer.validated_data
    result = dq.report(data["sample"], data["alpha"], data["kind"])
    return Response(DqReportSerializer(result).data)


@api_view(["POST"])
def optimize_weights(request):
    serializer = OptimizeInputSerializer(data=request.data)
    if not serializer.is_valid():
        return Response({"errors": serializer.errors}, 400)

    data = serializer.validated_data
    sample = data["sample"]
    log.info(f"Optimizing {sample.width} assets over {sample.size} scenarios")
    try:
        result = optimize.min_dq_ex(
            sample, data["alpha"], data["method"], big_m=data.get("big_m")
        )
    except OptimizationError as exc:
        log.error(f"Optimization failed: {exc}")
        return Response({"errors": {"solver": [str(exc)]}}, 400)

    return Response(OptimizationResultSerializer(result).data)
