"""Operator interest functions and curve construction.

A label series is turned into an interest curve of length ``T + l_obs``.
Each alarm episode starts at interest 1, decays towards ``b_dur`` while the
detector keeps reporting, and fades to 0 over the observation phase once the
reports stop.  Fragments whose distance is within ``l_obs`` are merged into
one episode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence, Union

import numpy as np

LabelLike = Union[Sequence[int], np.ndarray]

# 1 - sigmoid(-5); normalizer of both decay functions
_DECAY_NORM = 1.0 - 1.0 / (1.0 + math.exp(5.0))


@dataclass(frozen=True)
class OiprParams:
    """Phase lengths and duration-phase floor of the interest curve.

    Attributes:
        l_dis: length of the discovery phase, in time points.
        l_obs: length of the observation phase, in time points.
        b_dur: lower bound of interest in the duration phase, in [0, 1).
    """

    l_dis: int
    l_obs: int
    b_dur: float = 0.5

    def __post_init__(self):
        for name in ("l_dis", "l_obs"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise ValueError(f"{name} must be an integer, got {value!r}")
            if value < 0:
                raise ValueError(f"{name} must be non-negative, got {value}")
            object.__setattr__(self, name, int(value))
        b_dur = float(self.b_dur)
        if not 0.0 <= b_dur < 1.0:
            raise ValueError(f"b_dur must lie in [0, 1), got {self.b_dur}")
        object.__setattr__(self, "b_dur", b_dur)

    def to_dict(self) -> dict:
        return {"l_dis": self.l_dis, "l_obs": self.l_obs, "b_dur": self.b_dur}


# Fixed parameters of the special scenario dataset
SCENARIO_PARAMS = OiprParams(l_dis=5, l_obs=20, b_dur=0.5)


class Event(NamedTuple):
    """Inclusive index range of one run of anomalous points."""

    start: int
    end: int

    @property
    def length(self) -> int:
        return self.end - self.start + 1


def as_labels(labels: LabelLike, name: str = "labels") -> np.ndarray:
    """Validate a binary label sequence and return it as an int8 array."""
    arr = np.asarray(labels)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} must contain at least one time point")
    if arr.dtype == bool:
        return arr.astype(np.int8)
    bad = np.flatnonzero((arr != 0) & (arr != 1))
    if bad.size:
        i = int(bad[0])
        raise ValueError(f"{name}[{i}] = {arr[i]!r} is not a binary label")
    return arr.astype(np.int8)


def sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    z = math.exp(x)
    return z / (1.0 + z)


def omega(i: int, l_dis: int, b_dur: float) -> float:
    """Interest during the discovery and duration phases, ``i`` points after
    the episode start.

    Falls from 1 at ``i = 0`` towards ``b_dur``; the sigmoid midpoint sits at
    ``l_dis / 2``.  With ``l_dis = 0`` the decay is instantaneous and every
    ``i > 0`` gets exactly ``b_dur``.
    """
    if not 0.0 <= b_dur < 1.0:
        raise ValueError(f"b_dur must lie in [0, 1), got {b_dur}")
    if i < 0:
        raise ValueError(f"i must be non-negative, got {i}")
    if i == 0:
        return 1.0
    if l_dis == 0:
        return float(b_dur)
    return b_dur + (1.0 - b_dur) * (1.0 - sigmoid(10.0 * i / l_dis - 5.0)) / _DECAY_NORM


def gamma(i: int, l_obs: int) -> float:
    """Interest multiplier ``i`` points after the last reported anomaly."""
    if i < 0:
        raise ValueError(f"i must be non-negative, got {i}")
    if i == 0:
        return 1.0
    if i > l_obs:
        return 0.0
    return (1.0 - sigmoid(10.0 * i / l_obs - 5.0)) / _DECAY_NORM


def phi(i: int, l_dur: int, params: OiprParams) -> float:
    """Closed-form interest of a single uninterrupted event of length
    ``l_dis + l_dur``, with the duration value frozen through the observation
    phase.  Kept for reference; `build_interest_curve` is the production path.
    """
    l_dur = max(0, l_dur)
    active = params.l_dis + l_dur
    if i < active:
        return omega(i, params.l_dis, params.b_dur)
    if i < active + params.l_obs:
        return omega(active, params.l_dis, params.b_dur) * gamma(i - active + 1, params.l_obs)
    return 0.0


def events_from_labels(labels: LabelLike) -> list[Event]:
    """Maximal runs of consecutive 1s, sorted by start."""
    y = as_labels(labels)
    padded = np.concatenate(([0], y, [0]))
    diff = np.diff(padded)
    starts = np.flatnonzero(diff == 1)
    ends = np.flatnonzero(diff == -1) - 1
    return [Event(int(s), int(e)) for s, e in zip(starts, ends)]


def _omega_table(n: int, params: OiprParams) -> list[float]:
    return [omega(i, params.l_dis, params.b_dur) for i in range(n)]


def build_interest_curve(labels: LabelLike, params: OiprParams) -> np.ndarray:
    """Online construction of the operator interest curve.

    Returns an array of length ``T + l_obs``.  A point with label 1 opens a
    new episode when it lies more than ``l_obs`` after the previous reported
    point; otherwise it continues the running episode.
    """
    y = as_labels(labels)
    T = len(y)
    l_obs = params.l_obs
    w = _omega_table(T + l_obs + 1, params)
    g = [gamma(i, l_obs) for i in range(l_obs + 1)]
    curve = np.zeros(T + l_obs, dtype=float)

    p_start = p_end = -l_obs - 1
    for t, flag in enumerate(y.tolist()):
        if flag == 1:
            if t - p_end > l_obs:
                p_start = t
            curve[t] = w[t - p_start]
            p_end = t
        elif t - p_end <= l_obs:
            curve[t] = w[t - p_start] * g[t - p_end]
    for t in range(T, T + l_obs):
        if t - p_end <= l_obs:
            curve[t] = w[t - p_start] * g[t - p_end]
    return curve


def episode_starts(labels: LabelLike, l_obs: int) -> list[int]:
    """Indices where a new interest episode opens under the merge rule."""
    starts = []
    p_end = -l_obs - 1
    for t in np.flatnonzero(as_labels(labels)).tolist():
        if t - p_end > l_obs:
            starts.append(t)
        p_end = t
    return starts


def default_params(ground_truth: LabelLike, b_dur: float = 0.5) -> OiprParams:
    """Derive parameters from the mean ground-truth event length.

    ``l_dis`` is a quarter of the mean length and ``l_obs`` the mean length,
    both rounded up.

    Raises:
        ValueError: if the ground truth holds no anomaly event.
    """
    events = events_from_labels(ground_truth)
    if not events:
        raise ValueError("ground truth has no anomaly events; cannot derive default parameters")
    total = sum(e.length for e in events)
    n = len(events)
    # exact rational ceilings, avoids float noise on e.g. 12/3
    l_dis = -(-total // (4 * n))
    l_obs = -(-total // n)
    return OiprParams(l_dis=l_dis, l_obs=l_obs, b_dur=b_dur)
