"""Command-line front end.

    oipr evaluate --gt gt.csv --pred pred.csv --evaluators pw,pa,pak,oipr
    oipr scenarios --out data/ --seed 0
    oipr characteristics [--dataset data/] [--check]
    oipr adversarial --gt gt.csv --long-threshold 4 --out preds/
    oipr curve --labels pred.csv --gt gt.csv --out curve.csv
    oipr stats --gt gt.csv [--pred pred.csv] [--long-threshold 4]
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import io
from .characteristics import (
    characteristic_verdicts,
    render_matrix,
    render_verdicts,
    run_matrix,
    verdict_mismatches,
)
from .datagen import DisturbanceConfig, build_dataset, d_aggr, d_cont, d_disp, d_fp, d_long
from .interest import OiprParams, build_interest_curve
from .metrics import BUILTIN_EVALUATORS, evaluate, resolve_params
from .stats import dataset_stats

log = logging.getLogger("oipr")

OUTPUT_ENV = "OIPR_OUTPUT_DIR"


class CliError(Exception):
    pass


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        io.atomic_write(output, text.encode())
    else:
        sys.stdout.write(text)


def _param_overrides(args) -> dict:
    cfg = {"l_dis": args.l_dis, "l_obs": args.l_obs, "b_dur": args.b_dur}
    given = {k: v for k, v in cfg.items() if v is not None}
    if len(given) == 3:
        OiprParams(**given)  # validate early
    elif given:
        # validate each override against a neutral base
        base = {"l_dis": 1, "l_obs": 1, "b_dur": 0.5, **given}
        OiprParams(**base)
    return cfg


def _read_pair(gt_path: str, pred_path: str):
    gt = io.read_labels(gt_path)
    pred = io.read_labels(pred_path)
    if len(gt) != len(pred):
        raise CliError(
            f"length mismatch: {gt_path} has {len(gt)} points, {pred_path} has {len(pred)}"
        )
    return gt, pred


def cmd_evaluate(args) -> int:
    gt, pred = _read_pair(args.gt, args.pred)
    names = [n.strip() for n in args.evaluators.split(",") if n.strip()]
    config = {"k": args.k, **_param_overrides(args)}
    reports, failures = [], []
    for name in names:
        try:
            reports.append(evaluate(gt, pred, name, config))
        except (KeyError, ValueError) as exc:
            failures.append(f"{name}: {exc.args[0] if exc.args else exc}")
    if reports:
        _emit(io.write_report(reports, args.format).decode(), args.output)
    for f in failures:
        print(f"error: {f}", file=sys.stderr)
    return 1 if failures else 0


def _scenario_dir(args) -> Path:
    out = args.out or os.environ.get(OUTPUT_ENV)
    if not out:
        raise CliError(f"no output directory: pass --out or set {OUTPUT_ENV}")
    return Path(out)


def _matrix_json(cells) -> str:
    return json.dumps([c.to_dict() for c in cells], sort_keys=True, indent=2) + "\n"


def cmd_scenarios(args) -> int:
    out = _scenario_dir(args)
    cases = build_dataset(args.seed)
    io.write_dataset(cases, out)
    cells = run_matrix(cases, k=args.k)
    io.atomic_write(out / "matrix.json", _matrix_json(cells).encode())
    io.atomic_write(out / "matrix.txt", render_matrix(cells).encode())
    sys.stdout.write(render_matrix(cells) if args.format == "table" else _matrix_json(cells))
    log.info("wrote %d cases to %s", len(cases), out)
    return 0


def cmd_characteristics(args) -> int:
    cases = io.load_dataset(args.dataset) if args.dataset else build_dataset(args.seed)
    cells = run_matrix(cases, k=args.k)
    verdicts = characteristic_verdicts(cells)
    if args.format == "json":
        text = json.dumps(verdicts, sort_keys=True, indent=2) + "\n"
    else:
        text = render_verdicts(verdicts)
    _emit(text, args.output)
    if args.check:
        bad = verdict_mismatches(verdicts)
        for line in bad:
            print(f"mismatch: {line}", file=sys.stderr)
        return 1 if bad else 0
    return 0


def cmd_adversarial(args) -> int:
    gt_file = io.read_label_file(args.gt)
    gt = gt_file.series
    cfg = DisturbanceConfig(fp_rate=args.fp_rate, head_fraction=args.head_fraction, seed=args.seed)
    out = Path(args.out or os.environ.get(OUTPUT_ENV) or ".")
    detectors = {
        "d_fp": lambda: d_fp(gt),
        f"d_l{args.long_threshold}": lambda: d_long(gt, args.long_threshold),
        "d_disp": lambda: d_disp(gt, cfg),
        "d_aggr": lambda: d_aggr(gt, cfg),
        "d_cont": lambda: d_cont(gt, cfg),
    }
    failures = []
    for name, make in detectors.items():
        try:
            pred = make()
        except ValueError as exc:
            failures.append(f"{name}: {exc}")
            continue
        path = out / f"{name}.{gt_file.format}"
        io.write_labels(path, pred, gt_file.format, gt_file.timestamps)
        print(path)
    for f in failures:
        print(f"error: {f}", file=sys.stderr)
    return 1 if failures else 0


def cmd_curve(args) -> int:
    labels = io.read_labels(args.labels)
    reference = io.read_labels(args.gt) if args.gt else labels
    if len(reference) != len(labels):
        raise CliError("length mismatch between --labels and --gt")
    params, _ = resolve_params(reference, _param_overrides(args))
    io.write_curve(build_interest_curve(labels, params), args.out)
    print(json.dumps(params.to_dict(), sort_keys=True))
    return 0


def cmd_stats(args) -> int:
    gt = io.read_labels(args.gt)
    pred = None
    if args.pred:
        gt, pred = _read_pair(args.gt, args.pred)
    stats = dataset_stats(gt, args.long_threshold, pred)
    print(json.dumps(stats.to_dict(), sort_keys=True, indent=2))
    return 0


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--l-dis", type=int, help="discovery phase length (default: ceil(mean event length / 4))")
    p.add_argument("--l-obs", type=int, help="observation phase length (default: ceil(mean event length))")
    p.add_argument("--b-dur", type=float, help="duration-phase interest floor (default: 0.5)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oipr", description="Operator-interest TAD evaluation.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evaluate", help="score a prediction file against a ground-truth file")
    p.add_argument("--gt", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--evaluators", default=",".join(BUILTIN_EVALUATORS))
    _add_param_flags(p)
    p.add_argument("--k", type=float, default=50.0, help="PA%%K threshold in percent")
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.add_argument("--output")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("scenarios", help="write the special scenario dataset and its score matrix")
    p.add_argument("--out", help=f"output directory (default: ${OUTPUT_ENV})")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=float, default=50.0)
    p.add_argument("--format", choices=("json", "table"), default="table")
    p.set_defaults(func=cmd_scenarios)

    p = sub.add_parser("characteristics", help="derive evaluator characteristic verdicts")
    p.add_argument("--dataset", help="directory written by 'scenarios' (default: generate in memory)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=float, default=50.0)
    p.add_argument("--format", choices=("json", "table"), default="table")
    p.add_argument("--output")
    p.add_argument("--check", action="store_true", help="exit 1 if any verdict differs from the reference table")
    p.set_defaults(func=cmd_characteristics)

    p = sub.add_parser("adversarial", help="write the five adversarial detector outputs for a ground truth")
    p.add_argument("--gt", required=True)
    p.add_argument("--long-threshold", type=int, required=True, help="minimum event length for d_l")
    p.add_argument("--fp-rate", type=float, default=0.01)
    p.add_argument("--head-fraction", type=float, default=0.03)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help=f"output directory (default: ${OUTPUT_ENV} or .)")
    p.set_defaults(func=cmd_adversarial)

    p = sub.add_parser("curve", help="export the interest curve of a label file as CSV")
    p.add_argument("--labels", required=True)
    p.add_argument("--gt", help="ground truth used to derive default parameters (default: --labels)")
    _add_param_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("stats", help="event statistics of a ground truth (and R_N for a prediction)")
    p.add_argument("--gt", required=True)
    p.add_argument("--pred")
    p.add_argument("--long-threshold", type=int)
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (CliError, ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
