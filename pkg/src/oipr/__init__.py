"""Operator-interest precision/recall for time-series anomaly detection,
with point-based baselines and a special scenario dataset."""

from .interest import (
    SCENARIO_PARAMS,
    Event,
    OiprParams,
    build_interest_curve,
    default_params,
    events_from_labels,
    gamma,
    omega,
    phi,
    sigmoid,
)
from .metrics import (
    ConfusionAreas,
    EvalReport,
    PointConfusion,
    PrfScores,
    auc,
    evaluate,
    oipr_scores,
    pa_scores,
    pak_scores,
    pointwise_min,
    pw_scores,
    register_evaluator,
)

__version__ = "0.1.0"

__all__ = [
    "SCENARIO_PARAMS",
    "ConfusionAreas",
    "EvalReport",
    "Event",
    "OiprParams",
    "PointConfusion",
    "PrfScores",
    "auc",
    "build_interest_curve",
    "default_params",
    "evaluate",
    "events_from_labels",
    "gamma",
    "oipr_scores",
    "omega",
    "pa_scores",
    "pak_scores",
    "phi",
    "pointwise_min",
    "pw_scores",
    "register_evaluator",
    "sigmoid",
]
