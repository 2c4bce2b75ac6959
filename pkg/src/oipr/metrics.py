"""Area-based OIPR scores and the point-based PW / PA / PA%K baselines.

Every evaluator is reachable through :func:`evaluate`, which returns an
:class:`EvalReport`.  Third-party evaluators plug in with
:func:`register_evaluator`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Optional

import numpy as np

from .interest import (
    LabelLike,
    OiprParams,
    as_labels,
    build_interest_curve,
    default_params,
    events_from_labels,
)


@dataclass(frozen=True)
class PrfScores:
    precision: float
    recall: float
    f1: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.precision, self.recall, self.f1)

    def to_dict(self) -> dict:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1}

    def fmt(self, digits: int = 3) -> str:
        return "/".join(f"{v:.{digits}f}" for v in self.as_tuple())


@dataclass(frozen=True)
class PointConfusion:
    tp: int
    fp: int
    fn: int

    def to_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn}


@dataclass(frozen=True)
class ConfusionAreas:
    """Overlap area of the two interest curves and the residual areas."""

    tp_oi: float
    fp_oi: float
    fn_oi: float

    def to_dict(self) -> dict:
        return {"tp_oi": self.tp_oi, "fp_oi": self.fp_oi, "fn_oi": self.fn_oi}


@dataclass
class EvalReport:
    """Result of one evaluator on one (ground truth, prediction) pair.

    ``config`` echoes every parameter that shaped the scores, including
    derived defaults, so a run can be reproduced from the report alone.
    """

    evaluator: str
    config: dict
    scores: PrfScores
    areas: Optional[ConfusionAreas] = None
    counts: Optional[PointConfusion] = None
    flags: dict = field(default_factory=dict)
    digest: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "evaluator": self.evaluator,
            "config": dict(self.config),
            "scores": self.scores.to_dict(),
            "flags": dict(self.flags),
            "digest": dict(self.digest),
        }
        if self.areas is not None:
            out["areas"] = self.areas.to_dict()
        if self.counts is not None:
            out["counts"] = self.counts.to_dict()
        return out

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "EvalReport":
        return cls(
            evaluator=d["evaluator"],
            config=dict(d.get("config", {})),
            scores=PrfScores(**d["scores"]),
            areas=ConfusionAreas(**d["areas"]) if d.get("areas") is not None else None,
            counts=PointConfusion(**d["counts"]) if d.get("counts") is not None else None,
            flags=dict(d.get("flags", {})),
            digest=dict(d.get("digest", {})),
        )


def f1_score(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def _ratio(num: float, den: float) -> float:
    # zero denominators score 0; callers flag them
    return float(num / den) if den > 0 else 0.0


def prf_from_counts(tp: float, fp: float, fn: float) -> PrfScores:
    p = _ratio(tp, tp + fp)
    r = _ratio(tp, tp + fn)
    return PrfScores(p, r, f1_score(p, r))


def _pair(gt: LabelLike, pred: LabelLike) -> tuple[np.ndarray, np.ndarray]:
    y = as_labels(gt, "ground truth")
    y_hat = as_labels(pred, "prediction")
    if len(y) != len(y_hat):
        raise ValueError(
            f"length mismatch: ground truth has {len(y)} points, prediction has {len(y_hat)}"
        )
    return y, y_hat


# -- area-based ---------------------------------------------------------------


def auc(curve: np.ndarray) -> float:
    """Area under a discrete curve: the plain sum of its samples."""
    return float(np.sum(np.asarray(curve, dtype=float)))


def pointwise_min(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"curve length mismatch: {a.shape} vs {b.shape}")
    return np.minimum(a, b)


def oipr_scores(
    gt: LabelLike, pred: LabelLike, params: OiprParams
) -> tuple[ConfusionAreas, PrfScores]:
    y, y_hat = _pair(gt, pred)
    ideal = build_interest_curve(y, params)
    actual = build_interest_curve(y_hat, params)
    tp = auc(pointwise_min(ideal, actual))
    auc_pred = auc(actual)
    auc_gt = auc(ideal)
    # clamp rounding residue so the areas stay non-negative
    areas = ConfusionAreas(tp, max(auc_pred - tp, 0.0), max(auc_gt - tp, 0.0))
    p = _ratio(tp, auc_pred)
    r = _ratio(tp, auc_gt)
    return areas, PrfScores(p, r, f1_score(p, r))


# -- point-based --------------------------------------------------------------


def point_confusion(gt: LabelLike, pred: LabelLike) -> PointConfusion:
    y, y_hat = _pair(gt, pred)
    tp = int(np.sum((y == 1) & (y_hat == 1)))
    fp = int(np.sum((y == 0) & (y_hat == 1)))
    fn = int(np.sum((y == 1) & (y_hat == 0)))
    return PointConfusion(tp, fp, fn)


def pw_scores(gt: LabelLike, pred: LabelLike) -> tuple[PointConfusion, PrfScores]:
    c = point_confusion(gt, pred)
    return c, prf_from_counts(c.tp, c.fp, c.fn)


def adjust_predictions(gt: LabelLike, pred: LabelLike, k_percent: float = 0.0) -> np.ndarray:
    """Point adjustment: fill in every ground-truth event whose detected
    share reaches ``k_percent``.  ``k_percent = 0`` is plain PA (any hit).
    Points outside the filled events are left untouched.
    """
    y, y_hat = _pair(gt, pred)
    adjusted = y_hat.copy()
    for ev in events_from_labels(y):
        hits = int(y_hat[ev.start : ev.end + 1].sum())
        if hits == 0:
            continue
        if 100.0 * hits / ev.length >= k_percent:
            adjusted[ev.start : ev.end + 1] = 1
    return adjusted


def pa_scores(gt: LabelLike, pred: LabelLike) -> tuple[PointConfusion, PrfScores]:
    return pw_scores(gt, adjust_predictions(gt, pred))


def pak_scores(
    gt: LabelLike, pred: LabelLike, k_percent: float = 50.0
) -> tuple[PointConfusion, PrfScores]:
    if not 0 < k_percent <= 100:
        raise ValueError(f"k_percent must lie in (0, 100], got {k_percent}")
    return pw_scores(gt, adjust_predictions(gt, pred, k_percent))


# -- dispatch -----------------------------------------------------------------

Evaluator = Callable[[np.ndarray, np.ndarray, Mapping[str, Any]], EvalReport]
PluginEvaluator = Callable[[np.ndarray, np.ndarray, Mapping[str, Any]], PrfScores]

_REGISTRY: dict[str, Evaluator] = {}

BUILTIN_EVALUATORS = ("pw", "pa", "pak", "oipr")


def _digest(y: np.ndarray, y_hat: np.ndarray) -> dict:
    return {
        "length": int(len(y)),
        "gt_events": len(events_from_labels(y)),
        "pred_events": len(events_from_labels(y_hat)),
        "gt_points": int(y.sum()),
        "pred_points": int(y_hat.sum()),
    }


def _point_flags(c: PointConfusion) -> dict:
    return {
        "precision_denominator_zero": c.tp + c.fp == 0,
        "recall_denominator_zero": c.tp + c.fn == 0,
    }


def _eval_pw(y, y_hat, config):
    c, s = pw_scores(y, y_hat)
    return EvalReport("pw", {}, s, counts=c, flags=_point_flags(c))


def _eval_pa(y, y_hat, config):
    c, s = pa_scores(y, y_hat)
    return EvalReport("pa", {}, s, counts=c, flags=_point_flags(c))


def _eval_pak(y, y_hat, config):
    k = float(config.get("k", 50.0))
    c, s = pak_scores(y, y_hat, k)
    return EvalReport("pak", {"k": k}, s, counts=c, flags=_point_flags(c))


PARAM_NAMES = ("l_dis", "l_obs", "b_dur")


def resolve_params(gt: LabelLike, config: Mapping[str, Any]) -> tuple[OiprParams, dict]:
    """Merge explicit parameter values in ``config`` over the defaults
    derived from ``gt``.  Returns the parameters and notice flags.
    """
    given = {k: config[k] for k in PARAM_NAMES if config.get(k) is not None}
    flags: dict = {}
    if len(given) == len(PARAM_NAMES):
        return OiprParams(**given), {"params_derived": False, "params_overridden": sorted(given)}
    try:
        base = default_params(gt).to_dict()
    except ValueError:
        missing = [k for k in PARAM_NAMES if k not in given]
        raise ValueError(
            "ground truth has no anomaly events, so "
            + ", ".join(missing)
            + " cannot be derived; pass them explicitly"
        ) from None
    base.update(given)
    flags["params_derived"] = True
    flags["params_overridden"] = sorted(given)
    return OiprParams(**base), flags


def _eval_oipr(y, y_hat, config):
    params, flags = resolve_params(y, config)
    areas, s = oipr_scores(y, y_hat, params)
    flags["precision_denominator_zero"] = areas.tp_oi + areas.fp_oi == 0
    flags["recall_denominator_zero"] = areas.tp_oi + areas.fn_oi == 0
    return EvalReport("oipr", params.to_dict(), s, areas=areas, flags=flags)


_REGISTRY.update(pw=_eval_pw, pa=_eval_pa, pak=_eval_pak, oipr=_eval_oipr)


def register_evaluator(name: str, fn: PluginEvaluator, *, replace: bool = False) -> None:
    """Attach an external evaluator under ``name``.

    ``fn(gt, pred, config)`` receives two equal-length int8 arrays and the
    caller's config mapping, and returns :class:`PrfScores`.
    """
    if name in BUILTIN_EVALUATORS:
        raise ValueError(f"cannot replace built-in evaluator {name!r}")
    if name in _REGISTRY and not replace:
        raise ValueError(f"evaluator {name!r} is already registered")

    def wrapped(y, y_hat, config):
        scores = fn(y, y_hat, config)
        if not isinstance(scores, PrfScores):
            raise TypeError(f"evaluator {name!r} returned {type(scores).__name__}, not PrfScores")
        return EvalReport(name, dict(config), scores)

    _REGISTRY[name] = wrapped


def unregister_evaluator(name: str) -> None:
    if name in BUILTIN_EVALUATORS:
        raise ValueError(f"cannot remove built-in evaluator {name!r}")
    _REGISTRY.pop(name, None)


def available_evaluators() -> list[str]:
    return list(_REGISTRY)


def evaluate(
    gt: LabelLike,
    pred: LabelLike,
    evaluator: str,
    config: Optional[Mapping[str, Any]] = None,
) -> EvalReport:
    """Score ``pred`` against ``gt`` with the named evaluator.

    Raises:
        KeyError: unknown evaluator name.
        ValueError: invalid labels or mismatched lengths.
    """
    try:
        fn = _REGISTRY[evaluator]
    except KeyError:
        known = ", ".join(_REGISTRY)
        raise KeyError(f"unknown evaluator {evaluator!r} (available: {known})") from None
    y, y_hat = _pair(gt, pred)
    report = fn(y, y_hat, dict(config or {}))
    report.digest = _digest(y, y_hat)
    return report
