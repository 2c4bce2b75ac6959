"""Label files, interest-curve export, evaluation reports and the on-disk
layout of the scenario dataset.

Label CSV: header ``label`` (optionally preceded by a ``timestamp`` column
that is carried through round-trips), one row per time point.
Label JSON: ``{"labels": [0, 1, ...]}``.
"""

from __future__ import annotations

import csv
import io as _stdio
import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .datagen import ScenarioCase
from .interest import OiprParams, as_labels
from .metrics import EvalReport, PrfScores

PathLike = Union[str, os.PathLike]
FORMATS = ("csv", "json")


class LabelFormatError(ValueError):
    """A label file that cannot be parsed.  ``row`` counts data rows from 1."""

    def __init__(self, path, message: str, row: Optional[int] = None, column: Optional[str] = None):
        self.path = str(path)
        self.row = row
        self.column = column
        where = ""
        if row is not None:
            where += f" row {row}"
        if column is not None:
            where += f" column {column!r}"
        super().__init__(f"{self.path}:{where + ':' if where else ''} {message}")


@dataclass
class LabelFile:
    path: str
    format: str
    series: np.ndarray
    timestamps: Optional[list] = None


def _infer_format(path: PathLike, fmt: Optional[str]) -> str:
    if fmt is None:
        suffix = Path(path).suffix.lower().lstrip(".")
        fmt = suffix if suffix in FORMATS else "csv"
    if fmt not in FORMATS:
        raise ValueError(f"unsupported label format {fmt!r}; expected one of {FORMATS}")
    return fmt


def _parse_csv(path: PathLike, text: str) -> tuple[np.ndarray, Optional[list]]:
    rows = list(csv.reader(_stdio.StringIO(text)))
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if not rows:
        raise LabelFormatError(path, "file is empty")
    header = [h.strip() for h in rows[0]]
    if header == ["label"]:
        has_ts = False
    elif header == ["timestamp", "label"]:
        has_ts = True
    else:
        raise LabelFormatError(
            path, f"malformed header {','.join(header)!r}; expected 'label' or 'timestamp,label'"
        )
    data = rows[1:]
    if not data:
        raise LabelFormatError(path, "no label rows (series length 0)")
    labels = []
    stamps = [] if has_ts else None
    width = len(header)
    for i, row in enumerate(data, start=1):
        if len(row) != width:
            raise LabelFormatError(path, f"expected {width} cells, got {len(row)}", row=i)
        cell = row[-1].strip()
        if cell not in ("0", "1"):
            raise LabelFormatError(path, f"label {cell!r} is not 0 or 1", row=i, column="label")
        labels.append(int(cell))
        if has_ts:
            stamps.append(row[0])
    return np.asarray(labels, dtype=np.int8), stamps


def _parse_json(path: PathLike, text: str) -> np.ndarray:
    if not text.strip():
        raise LabelFormatError(path, "file is empty")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise LabelFormatError(path, f"invalid JSON: {exc.msg}", row=exc.lineno) from None
    if not isinstance(obj, dict) or not isinstance(obj.get("labels"), list):
        raise LabelFormatError(path, 'expected an object {"labels": [...]}')
    values = obj["labels"]
    if not values:
        raise LabelFormatError(path, "no labels (series length 0)")
    for i, v in enumerate(values):
        if isinstance(v, bool) or v not in (0, 1):
            raise LabelFormatError(path, f"label {v!r} is not 0 or 1", row=i + 1, column="labels")
    return np.asarray(values, dtype=np.int8)


def read_label_file(path: PathLike, format: Optional[str] = None) -> LabelFile:
    fmt = _infer_format(path, format)
    text = Path(path).read_text(encoding="utf-8")
    if fmt == "csv":
        series, stamps = _parse_csv(path, text)
    else:
        series, stamps = _parse_json(path, text), None
    return LabelFile(str(path), fmt, series, stamps)


def read_labels(path: PathLike, format: Optional[str] = None) -> np.ndarray:
    return read_label_file(path, format).series


def atomic_write(path: PathLike, data: bytes) -> None:
    """Write ``data`` to a temp file next to ``path`` and rename it over."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def labels_to_bytes(
    labels, format: str = "csv", timestamps: Optional[Sequence] = None
) -> bytes:
    y = as_labels(labels)
    if format == "json":
        return (json.dumps({"labels": y.tolist()}) + "\n").encode()
    if format != "csv":
        raise ValueError(f"unsupported label format {format!r}")
    buf = _stdio.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if timestamps is not None:
        if len(timestamps) != len(y):
            raise ValueError("timestamps and labels differ in length")
        writer.writerow(["timestamp", "label"])
        writer.writerows(zip(timestamps, y.tolist()))
    else:
        writer.writerow(["label"])
        writer.writerows([v] for v in y.tolist())
    return buf.getvalue().encode()


def write_labels(
    path: PathLike, labels, format: Optional[str] = None, timestamps: Optional[Sequence] = None
) -> None:
    atomic_write(path, labels_to_bytes(labels, _infer_format(path, format), timestamps))


def write_label_file(label_file: LabelFile, path: Optional[PathLike] = None) -> None:
    write_labels(path or label_file.path, label_file.series, label_file.format, label_file.timestamps)


# -- curves -------------------------------------------------------------------


def curve_to_bytes(curve) -> bytes:
    values = np.asarray(curve, dtype=float)
    lines = ["index,value"]
    lines.extend(f"{i},{float(v)!r}" for i, v in enumerate(values))
    return ("\n".join(lines) + "\n").encode()


def write_curve(curve, path: PathLike) -> None:
    atomic_write(path, curve_to_bytes(curve))


def read_curve(path: PathLike) -> np.ndarray:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["index", "value"]:
            raise ValueError(f"{path}: expected header 'index,value', got {header!r}")
        return np.array([float(row[1]) for row in reader], dtype=float)


# -- reports ------------------------------------------------------------------


def _table(reports: Sequence[EvalReport]) -> str:
    lines = [f"{'evaluator':<10} {'P/R/F1':<18} config"]
    for r in reports:
        config = " ".join(f"{k}={v}" for k, v in sorted(r.config.items()))
        notes = [k for k, v in sorted(r.flags.items()) if v is True and k.endswith("_zero")]
        extra = f"  [{', '.join(notes)}]" if notes else ""
        lines.append(f"{r.evaluator:<10} {r.scores.fmt(3):<18} {config}{extra}".rstrip())
    return "\n".join(lines) + "\n"


def write_report(report: Union[EvalReport, Sequence[EvalReport]], format: str = "json") -> bytes:
    """Serialize one report (or a list of them) as stable-key JSON or as a
    plain-text table with scores to 3 decimals."""
    single = isinstance(report, EvalReport)
    reports = [report] if single else list(report)
    if format == "json":
        payload = reports[0].to_dict() if single else [r.to_dict() for r in reports]
        return (json.dumps(payload, sort_keys=True, indent=2) + "\n").encode()
    if format == "table":
        return _table(reports).encode()
    raise ValueError(f"unsupported report format {format!r}; expected 'json' or 'table'")


def parse_report(data: Union[bytes, str]) -> Union[EvalReport, list[EvalReport]]:
    obj = json.loads(data)
    if isinstance(obj, list):
        return [EvalReport.from_dict(d) for d in obj]
    return EvalReport.from_dict(obj)


# -- scenario dataset ---------------------------------------------------------


def _case_meta(case: ScenarioCase) -> dict:
    return {
        "scenario": case.scenario_name,
        "case": case.case_name,
        "length": int(len(case.ground_truth)),
        "params": case.params.to_dict(),
        "expected": {k: v.to_dict() for k, v in sorted(case.expected.items())},
        "approximate": list(case.approximate),
        "seed": case.seed,
        "trials": len(case.trials),
    }


def write_dataset(cases: Iterable[ScenarioCase], out_dir: PathLike) -> list[Path]:
    """Lay the cases out as ``<scenario>/<case>/`` directories holding
    ``ground_truth.csv``, ``prediction.csv`` (or ``trials/trial_NNN.csv``)
    and ``case.json``.  Returns the written paths."""
    out_dir = Path(out_dir)
    written = []
    index = []
    for case in cases:
        d = out_dir / case.scenario_name / case.case_name
        files = {d / "ground_truth.csv": labels_to_bytes(case.ground_truth)}
        if case.trials:
            for i, trial in enumerate(case.trials):
                files[d / "trials" / f"trial_{i:03d}.csv"] = labels_to_bytes(trial)
        else:
            files[d / "prediction.csv"] = labels_to_bytes(case.prediction)
        files[d / "case.json"] = (json.dumps(_case_meta(case), sort_keys=True, indent=2) + "\n").encode()
        for path, data in files.items():
            atomic_write(path, data)
            written.append(path)
        index.append(case.key)
    manifest = out_dir / "manifest.json"
    atomic_write(manifest, (json.dumps({"cases": index}, indent=2) + "\n").encode())
    written.append(manifest)
    return written


def load_dataset(root: PathLike) -> list[ScenarioCase]:
    root = Path(root)
    manifest = json.loads((root / "manifest.json").read_text())
    cases = []
    for key in manifest["cases"]:
        d = root / key
        meta = json.loads((d / "case.json").read_text())
        gt = read_labels(d / "ground_truth.csv")
        trials = ()
        if meta.get("trials"):
            trials = tuple(read_labels(d / "trials" / f"trial_{i:03d}.csv") for i in range(meta["trials"]))
            pred = trials[0]
        else:
            pred = read_labels(d / "prediction.csv")
        cases.append(
            ScenarioCase(
                scenario_name=meta["scenario"],
                case_name=meta["case"],
                ground_truth=gt,
                prediction=pred,
                params=OiprParams(**meta["params"]),
                expected={k: PrfScores(**v) for k, v in meta["expected"].items()},
                approximate=tuple(meta["approximate"]),
                seed=meta.get("seed"),
                trials=trials,
            )
        )
    return cases
