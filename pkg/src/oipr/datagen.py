"""Adversarial detectors and the special scenario dataset.

The five detectors are deterministic functions of the ground truth (plus a
seed for the randomized ones).  The scenario dataset holds 24 cases in nine
scenarios; each case carries the reference P/R/F1 values it is expected to
produce under PW, PA, PA%K (K = 50) and OIPR.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .interest import SCENARIO_PARAMS, LabelLike, OiprParams, as_labels, events_from_labels
from .metrics import PrfScores


@dataclass(frozen=True)
class DisturbanceConfig:
    """Knobs of the dispersed / aggregated / continuous disturbances.

    Attributes:
        fp_rate: share of the series length inserted as FP points.
        head_fraction: leading share of the series that receives the
            aggregated or continuous disturbance.
        seed: RNG seed for the randomized placements.
    """

    fp_rate: float = 0.01
    head_fraction: float = 0.03
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.fp_rate < 1:
            raise ValueError(f"fp_rate must lie in (0, 1), got {self.fp_rate}")
        if not 0 < self.head_fraction < 1:
            raise ValueError(f"head_fraction must lie in (0, 1), got {self.head_fraction}")


def d_fp(gt: LabelLike) -> np.ndarray:
    """First-point detector: flags only the first point of every event."""
    y = as_labels(gt, "ground truth")
    out = np.zeros_like(y)
    for ev in events_from_labels(y):
        out[ev.start] = 1
    return out


def d_long(gt: LabelLike, min_length: int) -> np.ndarray:
    """Long-anomaly detector: reproduces exactly the events of length
    ``>= min_length`` and nothing else."""
    if min_length < 1:
        raise ValueError(f"min_length must be >= 1, got {min_length}")
    y = as_labels(gt, "ground truth")
    out = np.zeros_like(y)
    for ev in events_from_labels(y):
        if ev.length >= min_length:
            out[ev.start : ev.end + 1] = 1
    return out


def _fp_count(n_points: int, fp_rate: float) -> int:
    # round before flooring so 0.01 * 2000 yields 20, not 19
    return int(np.floor(round(fp_rate * n_points, 9)))


def _insert_fps(y: np.ndarray, limit: int, cfg: DisturbanceConfig) -> np.ndarray:
    n_fp = _fp_count(len(y), cfg.fp_rate)
    out = y.copy()
    if n_fp == 0:
        return out
    candidates = np.flatnonzero(y[:limit] == 0)
    if len(candidates) < n_fp:
        raise ValueError(
            f"need {n_fp} normal positions for FP insertion but only {len(candidates)} "
            f"are available in the first {limit} points"
        )
    rng = np.random.default_rng(cfg.seed)
    out[rng.choice(candidates, size=n_fp, replace=False)] = 1
    return out


def d_disp(gt: LabelLike, cfg: DisturbanceConfig = DisturbanceConfig()) -> np.ndarray:
    """Ideal detector plus FP points scattered uniformly over the series."""
    y = as_labels(gt, "ground truth")
    return _insert_fps(y, len(y), cfg)


def d_aggr(gt: LabelLike, cfg: DisturbanceConfig = DisturbanceConfig()) -> np.ndarray:
    """Ideal detector plus FP points packed into the leading segment."""
    y = as_labels(gt, "ground truth")
    return _insert_fps(y, _fp_count(len(y), cfg.head_fraction), cfg)


def d_cont(gt: LabelLike, cfg: DisturbanceConfig = DisturbanceConfig()) -> np.ndarray:
    """Ideal detector with the whole leading segment forced to 1."""
    y = as_labels(gt, "ground truth")
    out = y.copy()
    out[: _fp_count(len(y), cfg.head_fraction)] = 1
    return out


def random_detector(n_points: int, p: float, seed: int) -> np.ndarray:
    """Independent Bernoulli(p) flags."""
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if n_points < 1:
        raise ValueError(f"n_points must be >= 1, got {n_points}")
    rng = np.random.default_rng(seed)
    return (rng.random(n_points) < p).astype(np.int8)


def trial_seeds(seed: int, n: int) -> list[int]:
    """Independent per-trial seeds derived from one master seed."""
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(n)]


# -- special scenario dataset -------------------------------------------------

LEAD = 20  # normal points before the first event (>= l_obs)
TAIL = 20  # normal points after the last event (>= l_obs)
SPACING = 40  # default gap between distinct events (2 * l_obs)


@dataclass
class ScenarioCase:
    """One labelled case of the special scenario dataset.

    ``expected`` maps evaluator name to the reference scores.  OIPR values
    depend on absolute positions the reference dataset does not pin down and
    are listed in ``approximate``.  For the random detector, ``trials`` holds
    every seeded prediction and ``prediction`` is the first of them.
    """

    scenario_name: str
    case_name: str
    ground_truth: np.ndarray
    prediction: np.ndarray
    params: OiprParams = SCENARIO_PARAMS
    expected: dict = field(default_factory=dict)
    approximate: tuple = ("oipr",)
    seed: Optional[int] = None
    trials: tuple = ()

    def __post_init__(self):
        self.ground_truth = as_labels(self.ground_truth, "ground truth")
        self.prediction = as_labels(self.prediction, "prediction")
        if len(self.ground_truth) != len(self.prediction):
            raise ValueError(f"{self.key}: ground truth and prediction differ in length")
        self.trials = tuple(as_labels(t, "trial") for t in self.trials)

    @property
    def key(self) -> str:
        return f"{self.scenario_name}/{self.case_name}"

    @property
    def predictions(self) -> tuple:
        return self.trials if self.trials else (self.prediction,)


def _prf(text: str) -> PrfScores:
    p, r, f = (float(v) for v in text.split("/"))
    return PrfScores(p, r, f)


def _expect(pw, pa, pak, oipr) -> dict:
    return {"pw": _prf(pw), "pa": _prf(pa), "pak": _prf(pak), "oipr": _prf(oipr)}


def _zeros(n: int) -> np.ndarray:
    return np.zeros(n, dtype=np.int8)


def _overlap_proportion(seed: int) -> list[ScenarioCase]:
    n = LEAD + 50 + TAIL
    gt = _zeros(n)
    gt[LEAD : LEAD + 50] = 1
    layout = [
        ("c1", 1, _expect("1.0/0.02/0.039", "1.0/1.0/1.0", "1.0/0.02/0.039", "1.0/0.217/0.356")),
        ("c2", 10, _expect("1.0/0.2/0.333", "1.0/1.0/1.0", "1.0/0.2/0.333", "1.0/0.361/0.53")),
        ("c3", 26, _expect("1.0/0.52/0.684", "1.0/1.0/1.0", "1.0/1.0/1.0", "1.0/0.617/0.763")),
        ("c4", 50, _expect("1.0/1.0/1.0", "1.0/1.0/1.0", "1.0/1.0/1.0", "1.0/1.0/1.0")),
    ]
    cases = []
    for name, k, exp in layout:
        pred = _zeros(n)
        pred[LEAD : LEAD + k] = 1
        cases.append(ScenarioCase("overlap_proportion", name, gt, pred, expected=exp))
    return cases


def _fragmented_tps(seed: int) -> list[ScenarioCase]:
    # 30-point event, one FP point 30 points after it
    fp_at = LEAD + 30 + 30
    n = fp_at + 1 + TAIL
    gt = _zeros(n)
    gt[LEAD : LEAD + 30] = 1

    def runs(lengths, gaps):
        pred = _zeros(n)
        pos = LEAD
        for length, gap in zip(lengths, list(gaps) + [0]):
            pred[pos : pos + length] = 1
            pos += length + gap
        pred[fp_at] = 1
        return pred

    c1 = runs([30], [])
    c2 = runs([7, 7, 6], [5, 5])
    c3 = runs([2] * 10, [1] * 9)
    return [
        ScenarioCase("fragmented_tps", "c1", gt, c1, expected=_expect(
            "0.968/1.0/0.984", "0.968/1.0/0.984", "0.968/1.0/0.984", "0.758/1.0/0.863")),
        ScenarioCase("fragmented_tps", "c2", gt, c2, expected=_expect(
            "0.952/0.667/0.784", "0.968/1.0/0.984", "0.968/1.0/0.984", "0.757/0.993/0.859")),
        ScenarioCase("fragmented_tps", "c3", gt, c3, expected=_expect(
            "0.952/0.667/0.784", "0.968/1.0/0.984", "0.968/1.0/0.984", "0.754/0.976/0.85")),
    ]


def _fragmented_fps(seed: int) -> list[ScenarioCase]:
    first_fp = LEAD + 20 + 30
    n = first_fp + 9 * 30 + 1 + TAIL
    gt = _zeros(n)
    gt[LEAD : LEAD + 20] = 1
    c1 = gt.copy()
    c1[first_fp : first_fp + 9 * 30 + 1 : 30] = 1
    c2 = gt.copy()
    c2[first_fp : first_fp + 19 : 2] = 1
    c3 = gt.copy()
    c3[first_fp : first_fp + 20] = 1
    return [
        ScenarioCase("fragmented_fps", "c1", gt, c1, expected=_expect(
            "0.667/1.0/0.8", "0.667/1.0/0.8", "0.667/1.0/0.8", "0.194/1.0/0.324")),
        ScenarioCase("fragmented_fps", "c2", gt, c2, expected=_expect(
            "0.667/1.0/0.8", "0.667/1.0/0.8", "0.667/1.0/0.8", "0.508/1.0/0.674")),
        ScenarioCase("fragmented_fps", "c3", gt, c3, expected=_expect(
            "0.5/1.0/0.667", "0.5/1.0/0.667", "0.5/1.0/0.667", "0.5/1.0/0.667")),
    ]


def _temporal_shifting(seed: int) -> list[ScenarioCase]:
    starts = [LEAD + k * (2 + SPACING) for k in range(3)]
    n = starts[-1] + 2 + TAIL
    gt = _zeros(n)
    early = _zeros(n)
    late = _zeros(n)
    for s in starts:
        gt[s : s + 2] = 1
        early[s - 2 : s] = 1
        late[s + 2 : s + 4] = 1
    exp = _expect("0.0/0.0/0.0", "0.0/0.0/0.0", "0.0/0.0/0.0", "0.729/0.729/0.729")
    return [
        ScenarioCase("temporal_shifting", "c1", gt, early, expected=exp),
        ScenarioCase("temporal_shifting", "c2", gt, late, expected=dict(exp)),
    ]


def _tp_positions(seed: int) -> list[ScenarioCase]:
    n = LEAD + 30 + TAIL
    gt = _zeros(n)
    gt[LEAD : LEAD + 30] = 1
    pw = "1.0/0.033/0.065"
    oipr = {0: "1.0/0.319/0.483", 14: "0.785/0.25/0.38", 29: "0.779/0.248/0.376"}
    cases = []
    for i, offset in enumerate((0, 14, 29), start=1):
        pred = _zeros(n)
        pred[LEAD + offset] = 1
        cases.append(ScenarioCase("tp_positions", f"c{i}", gt, pred,
                                  expected=_expect(pw, "1.0/1.0/1.0", pw, oipr[offset])))
    return cases


def _long_anomaly_effect(seed: int) -> list[ScenarioCase]:
    long_start = LEAD
    short = [LEAD + 10 + SPACING + k * (1 + SPACING) for k in range(6)]
    fps = [short[-1] + (k + 1) * (1 + SPACING) for k in range(3)]
    n = fps[-1] + 1 + TAIL
    gt = _zeros(n)
    gt[long_start : long_start + 10] = 1
    gt[short] = 1
    c1 = _zeros(n)
    c1[long_start : long_start + 10] = 1
    c2 = _zeros(n)
    c2[short] = 1
    c3 = c1.copy()
    c3[fps] = 1
    return [
        ScenarioCase("long_anomaly_effect", "c1", gt, c1, expected=_expect(
            "1.0/0.625/0.769", "1.0/0.625/0.769", "1.0/0.625/0.769", "1.0/0.217/0.357")),
        ScenarioCase("long_anomaly_effect", "c2", gt, c2, expected=_expect(
            "1.0/0.375/0.545", "1.0/0.375/0.545", "1.0/0.375/0.545", "1.0/0.783/0.878")),
        ScenarioCase("long_anomaly_effect", "c3", gt, c3, expected=_expect(
            "0.769/0.625/0.69", "0.769/0.625/0.69", "0.769/0.625/0.69", "0.357/0.217/0.27")),
    ]


def _sparse_anomalies(seed: int) -> list[ScenarioCase]:
    a, b = LEAD, LEAD + 200
    n = b + 1 + TAIL
    gt = _zeros(n)
    gt[[a, b]] = 1
    c1 = _zeros(n)
    c1[a] = 1
    c2 = c1.copy()
    c2[(a + b) // 2] = 1
    return [
        ScenarioCase("sparse_anomalies", "c1", gt, c1, expected=_expect(
            "1.0/0.5/0.667", "1.0/0.5/0.667", "1.0/0.5/0.667", "1.0/0.5/0.667")),
        ScenarioCase("sparse_anomalies", "c2", gt, c2, expected=_expect(
            "0.5/0.5/0.5", "0.5/0.5/0.5", "0.5/0.5/0.5", "0.5/0.5/0.5")),
    ]


def _constant_detectors(seed: int) -> list[ScenarioCase]:
    # the all-ones precision of 0.1 pins the series length to 1000
    n = 1000
    gt = _zeros(n)
    pos = LEAD
    for length in (10, 20, 30, 40):
        gt[pos : pos + length] = 1
        pos += length + SPACING
    return [
        ScenarioCase("constant_detectors", "c1", gt, _zeros(n), expected=_expect(
            "0.0/0.0/0.0", "0.0/0.0/0.0", "0.0/0.0/0.0", "0.0/0.0/0.0")),
        ScenarioCase("constant_detectors", "c2", gt, np.ones(n, dtype=np.int8), expected=_expect(
            "0.1/1.0/0.182", "0.1/1.0/0.182", "0.1/1.0/0.182", "0.137/0.92/0.238")),
    ]


RANDOM_TRIALS = 100
RANDOM_P = 0.02
RANDOM_LENGTH = 1000


def _random_detector(seed: int) -> list[ScenarioCase]:
    n = RANDOM_LENGTH
    short_gt = _zeros(n)
    for k in range(15):
        s = LEAD + k * (3 + SPACING)
        short_gt[s : s + 3] = 1
    long_gt = _zeros(n)
    mid = (n - 45) // 2
    long_gt[mid : mid + 45] = 1
    # the same seeded predictions are scored against both ground truths
    trials = tuple(random_detector(n, RANDOM_P, s) for s in trial_seeds(seed, RANDOM_TRIALS))
    exp1 = _expect("0.046/0.019/0.027", "0.115/0.057/0.076", "0.047/0.019/0.027", "0.179/0.172/0.173")
    exp2 = _expect("0.05/0.021/0.029", "0.459/0.64/0.534", "0.05/0.021/0.029", "0.05/0.194/0.08")
    approx = ("pw", "pa", "pak", "oipr")
    return [
        ScenarioCase("random_detector", "c1", short_gt, trials[0], expected=exp1,
                     approximate=approx, seed=seed, trials=trials),
        ScenarioCase("random_detector", "c2", long_gt, trials[0], expected=exp2,
                     approximate=approx, seed=seed, trials=trials),
    ]


_BUILDERS = {
    "overlap_proportion": _overlap_proportion,
    "fragmented_tps": _fragmented_tps,
    "fragmented_fps": _fragmented_fps,
    "temporal_shifting": _temporal_shifting,
    "tp_positions": _tp_positions,
    "long_anomaly_effect": _long_anomaly_effect,
    "sparse_anomalies": _sparse_anomalies,
    "constant_detectors": _constant_detectors,
    "random_detector": _random_detector,
}

SCENARIO_NAMES = tuple(_BUILDERS)


def build_scenario(name: str, seed: int = 0) -> list[ScenarioCase]:
    """Cases of one scenario.  ``seed`` only affects ``random_detector``."""
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise KeyError(
            f"unknown scenario {name!r} (available: {', '.join(SCENARIO_NAMES)})"
        ) from None
    return builder(seed)


def build_dataset(seed: int = 0) -> list[ScenarioCase]:
    """All 24 cases, in reference table order."""
    return [case for name in SCENARIO_NAMES for case in build_scenario(name, seed)]
