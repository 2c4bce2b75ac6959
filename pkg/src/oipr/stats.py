"""Dataset and detection statistics: event counts, mean event length,
long-anomaly ratios and the contaminated normal interval ratio."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .interest import LabelLike, as_labels, events_from_labels


@dataclass(frozen=True)
class DatasetStats:
    n_points: int
    n_events: int
    avg_event_len: Optional[float]
    long_event_ratio: Optional[float] = None
    long_point_ratio: Optional[float] = None
    r_n: Optional[float] = None

    def to_dict(self) -> dict:
        return asdict(self)


def long_anomaly_ratios(gt: LabelLike, min_length: int) -> tuple[float, float]:
    """Share of events with length ``>= min_length``, and share of anomaly
    points that fall inside such events.

    Raises:
        ValueError: if ``gt`` has no events.
    """
    if min_length < 1:
        raise ValueError(f"min_length must be >= 1, got {min_length}")
    lengths = np.array([e.length for e in events_from_labels(gt)])
    if lengths.size == 0:
        raise ValueError("ground truth has no anomaly events")
    long = lengths >= min_length
    return float(long.mean()), float(lengths[long].sum() / lengths.sum())


def contaminated_interval_ratio(gt: LabelLike, pred: LabelLike) -> Optional[float]:
    """Fraction of normal intervals between two adjacent ground-truth events
    that contain at least one predicted point.

    The leading and trailing normal segments are not intervals in this
    sense.  Returns ``None`` when the ground truth has fewer than two events.
    """
    y = as_labels(gt, "ground truth")
    y_hat = as_labels(pred, "prediction")
    if len(y) != len(y_hat):
        raise ValueError(f"length mismatch: {len(y)} vs {len(y_hat)}")
    events = events_from_labels(y)
    if len(events) < 2:
        return None
    dirty = sum(
        1 for a, b in zip(events, events[1:]) if y_hat[a.end + 1 : b.start].any()
    )
    return dirty / (len(events) - 1)


def dataset_stats(
    gt: LabelLike, min_length: Optional[int] = None, pred: Optional[LabelLike] = None
) -> DatasetStats:
    y = as_labels(gt, "ground truth")
    events = events_from_labels(y)
    n_events = len(events)
    avg = float(sum(e.length for e in events) / n_events) if n_events else None
    r_e = r_p = None
    if min_length is not None and n_events:
        r_e, r_p = long_anomaly_ratios(y, min_length)
    r_n = contaminated_interval_ratio(y, pred) if pred is not None else None
    return DatasetStats(len(y), n_events, avg, r_e, r_p, r_n)
