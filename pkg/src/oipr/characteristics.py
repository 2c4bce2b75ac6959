"""Scenario x evaluator matrix and the evaluator-characteristic verdicts
derived from it."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .datagen import ScenarioCase
from .metrics import BUILTIN_EVALUATORS, PrfScores, evaluate

# gap that counts as "significantly below" in the fragments-merging rule
MERGING_GAP = 0.1
# F1 of a detector that finds exactly one of the seven long-anomaly events
EVENT_SHARE_F1 = 0.25

YES, NO, PIECEWISE = "yes", "no", "piecewise"
PRESENT, ABSENT, MITIGATED = "present", "absent", "mitigated"

SYMBOLS = {
    YES: "✓",
    NO: "×",
    PIECEWISE: "*Piecewise",
    PRESENT: "◦",
    ABSENT: "-",
    MITIGATED: "*Mitigated",
}

# Published verdicts for the evaluators implemented here
REFERENCE_VERDICTS = {
    "existence_detection_reward": {"pw": NO, "pa": YES, "pak": PIECEWISE, "oipr": YES},
    "overlapping_proportion_awareness": {"pw": YES, "pa": NO, "pak": PIECEWISE, "oipr": YES},
    "fragmented_results_penalty": {"pw": NO, "pa": NO, "pak": NO, "oipr": YES},
    "fragments_merging": {"pw": NO, "pa": NO, "pak": NO, "oipr": YES},
    "addressing_ambiguous_labels": {"pw": NO, "pa": NO, "pak": NO, "oipr": YES},
    "early_detection_reward": {"pw": NO, "pa": NO, "pak": NO, "oipr": YES},
    "fragmentation_misleading_in_precision": {"pw": ABSENT, "pa": ABSENT, "pak": ABSENT, "oipr": ABSENT},
    "long_anomaly_misleading": {"pw": PRESENT, "pa": PRESENT, "pak": PRESENT, "oipr": MITIGATED},
    "sparse_anomaly_misleading": {"pw": ABSENT, "pa": ABSENT, "pak": ABSENT, "oipr": ABSENT},
}


def evaluate_case(case: ScenarioCase, evaluator: str, config: dict | None = None) -> PrfScores:
    """Score one case; multi-trial cases report the mean over trials."""
    cfg = dict(config or {})
    if evaluator == "oipr":
        cfg.update(case.params.to_dict())
    results = [evaluate(case.ground_truth, pred, evaluator, cfg).scores for pred in case.predictions]
    if len(results) == 1:
        return results[0]
    mean = np.mean([s.as_tuple() for s in results], axis=0)
    return PrfScores(*(float(v) for v in mean))


@dataclass
class MatrixCell:
    scenario: str
    case: str
    evaluator: str
    scores: PrfScores
    expected: PrfScores | None
    approximate: bool

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "case": self.case,
            "evaluator": self.evaluator,
            "scores": self.scores.to_dict(),
            "expected": self.expected.to_dict() if self.expected else None,
            "approximate": self.approximate,
        }


def run_matrix(
    cases: Iterable[ScenarioCase],
    evaluators: Sequence[str] = BUILTIN_EVALUATORS,
    k: float = 50.0,
) -> list[MatrixCell]:
    cells = []
    for case in cases:
        for name in evaluators:
            cfg = {"k": k} if name == "pak" else {}
            cells.append(
                MatrixCell(
                    case.scenario_name,
                    case.case_name,
                    name,
                    evaluate_case(case, name, cfg),
                    case.expected.get(name),
                    name in case.approximate,
                )
            )
    return cells


def _lookup(cells: Sequence[MatrixCell]) -> Callable[[str, str, str], PrfScores]:
    table = {(c.scenario, c.case, c.evaluator): c.scores for c in cells}

    def get(scenario: str, case: str, evaluator: str) -> PrfScores:
        return table[(scenario, case, evaluator)]

    return get


def _verdicts_for(get: Callable[[str, str], PrfScores]) -> dict:
    ov = {c: get("overlap_proportion", c) for c in ("c1", "c2", "c3", "c4")}
    pw_ov = {c: get("overlap_proportion", c, "pw") for c in ov}

    # existence reward: first-point case beats point-wise; piecewise if only
    # larger detected shares are lifted above point-wise
    if ov["c1"].f1 > pw_ov["c1"].f1:
        existence = YES
    elif any(ov[c].f1 > pw_ov[c].f1 for c in ("c2", "c3")):
        existence = PIECEWISE
    else:
        existence = NO

    f = [ov[c].f1 for c in ("c2", "c3", "c4")]
    steps = [b - a for a, b in zip(f, f[1:])]
    if all(s > 0 for s in steps):
        proportion = YES
    elif any(s > 0 for s in steps) and all(s >= 0 for s in steps):
        proportion = PIECEWISE
    else:
        proportion = NO

    ftp = {c: get("fragmented_tps", c) for c in ("c1", "c2", "c3")}
    penalty = YES if ftp["c3"].recall < ftp["c2"].recall else NO
    frag_precision = (
        PRESENT
        if ftp["c2"].precision > ftp["c1"].precision and ftp["c3"].precision > ftp["c1"].precision
        else ABSENT
    )

    ffp = {c: get("fragmented_fps", c).f1 for c in ("c1", "c2", "c3")}
    merging = YES if ffp["c1"] < ffp["c2"] - MERGING_GAP and ffp["c1"] < ffp["c3"] - MERGING_GAP else NO

    ts = [get("temporal_shifting", c).f1 for c in ("c1", "c2")]
    ambiguous = YES if all(v > 0 for v in ts) else NO

    tp = [get("tp_positions", c).f1 for c in ("c1", "c2", "c3")]
    early = YES if tp[0] > tp[1] >= tp[2] and tp[0] > tp[2] else NO

    la = {c: get("long_anomaly_effect", c).f1 for c in ("c1", "c2")}
    if la["c1"] > la["c2"]:
        long_misleading = PRESENT
    elif la["c1"] > EVENT_SHARE_F1:
        long_misleading = MITIGATED
    else:
        long_misleading = ABSENT

    sp = {c: get("sparse_anomalies", c).f1 for c in ("c1", "c2")}
    sparse = PRESENT if sp["c2"] > sp["c1"] else ABSENT

    return {
        "existence_detection_reward": existence,
        "overlapping_proportion_awareness": proportion,
        "fragmented_results_penalty": penalty,
        "fragments_merging": merging,
        "addressing_ambiguous_labels": ambiguous,
        "early_detection_reward": early,
        "fragmentation_misleading_in_precision": frag_precision,
        "long_anomaly_misleading": long_misleading,
        "sparse_anomaly_misleading": sparse,
    }


def characteristic_verdicts(
    cells: Sequence[MatrixCell], evaluators: Sequence[str] = BUILTIN_EVALUATORS
) -> dict[str, dict[str, str]]:
    """Map characteristic -> evaluator -> verdict for every evaluator in
    ``evaluators``.  The PW cells of the matrix must be present."""
    lookup = _lookup(cells)
    out: dict[str, dict[str, str]] = {name: {} for name in REFERENCE_VERDICTS}
    for ev in evaluators:

        def get(scenario, case, evaluator=ev):
            return lookup(scenario, case, evaluator)

        for name, verdict in _verdicts_for(get).items():
            out[name][ev] = verdict
    return out


def verdict_mismatches(verdicts: dict[str, dict[str, str]]) -> list[str]:
    """Verdicts that disagree with the published reference table."""
    bad = []
    for name, row in verdicts.items():
        for ev, verdict in row.items():
            ref = REFERENCE_VERDICTS.get(name, {}).get(ev)
            if ref is not None and ref != verdict:
                bad.append(f"{name}/{ev}: got {verdict}, reference {ref}")
    return bad


def render_verdicts(verdicts: dict[str, dict[str, str]]) -> str:
    evaluators = list(next(iter(verdicts.values())).keys()) if verdicts else []
    width = max(len(n) for n in verdicts) + 2
    lines = ["characteristic".ljust(width) + "".join(e.upper().ljust(12) for e in evaluators)]
    for name, row in verdicts.items():
        lines.append(name.ljust(width) + "".join(SYMBOLS[row[e]].ljust(12) for e in evaluators))
    return "\n".join(line.rstrip() for line in lines) + "\n"


def render_matrix(cells: Sequence[MatrixCell]) -> str:
    evaluators = list(dict.fromkeys(c.evaluator for c in cells))
    rows: dict[tuple[str, str], dict[str, MatrixCell]] = {}
    for c in cells:
        rows.setdefault((c.scenario, c.case), {})[c.evaluator] = c
    lines = [f"{'scenario':<22}{'case':<6}" + "".join(f"{e.upper():<20}" for e in evaluators)]
    for (scenario, case), by_ev in rows.items():
        lines.append(
            f"{scenario:<22}{case:<6}" + "".join(f"{by_ev[e].scores.fmt(3):<20}" for e in evaluators)
        )
    return "\n".join(line.rstrip() for line in lines) + "\n"
