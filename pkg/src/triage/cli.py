"""Command-line entry point.

    triage run  --config pipeline.yaml [--workers N] [--base-dir DIR]
    triage rank --batch <scores-batch> [--threshold F] [--metric KEY]
    triage eval --timelines <dir> --truth labels.csv [--metric KEY] [--plot out.svg]
    triage view --batch <scores-batch> [--bind HOST:PORT] [--ui DIST_DIR]

Exit code 0 means no stage had a fatal error; per-element failures are
reported in the run log and the final report but do not fail the process.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
from pathlib import Path

from .config import RunConfig, WorkerPoolConfig, parse_config
from .errors import TriageError
from .evaluation import average_precision, curve_to_svg, roc_auc, roc_curve, threshold_sweep
from .orchestrator import run
from .timeline import RANK_METRICS, load_timelines, rank_videos
from .viewer import serve


def _cmd_run(args: argparse.Namespace) -> int:
    config = parse_config(args.config)
    if args.base_dir:
        config = dataclasses.replace(config, folder=Path(args.base_dir))
    report = run(config, WorkerPoolConfig(workers=args.workers))
    print(json.dumps(report.to_dict(), indent=2))
    return 0


def _cmd_rank(args: argparse.Namespace) -> int:
    timelines = load_timelines(args.batch)
    ranking = rank_videos(timelines, args.threshold, args.metric)
    print(json.dumps(
        {"threshold": args.threshold, "metric": args.metric,
         "videos": [{"video_id": vid, "value": value} for vid, value in ranking]},
        indent=2,
    ))
    return 0


def _read_truth_csv(path: Path) -> dict[str, bool]:
    truth: dict[str, bool] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().lower() in ("video_id", ""):
                continue
            truth[row[0].strip()] = row[1].strip().lower() in ("1", "true", "yes")
    return truth


def _cmd_eval(args: argparse.Namespace) -> int:
    timelines = load_timelines(args.timelines)
    truth = _read_truth_csv(Path(args.truth))
    data = threshold_sweep(
        timelines, truth, metric=args.metric, frame_threshold=args.frame_threshold
    )
    curve = roc_curve(data)
    result = {
        "auc": roc_auc(data),
        "ap": average_precision(data),
        "curve_points": [
            # the leading sentinel has an infinite threshold; emit null there
            # so the output stays strict JSON
            {"x": p.x, "y": p.y,
             "threshold": p.threshold if math.isfinite(p.threshold) else None}
            for p in curve
        ],
    }
    print(json.dumps(result, indent=2))
    if args.plot:
        Path(args.plot).write_text(
            curve_to_svg(curve, title=f"ROC (AUC={result['auc']:.3f})"), encoding="utf-8"
        )
    return 0


def _cmd_view(args: argparse.Namespace) -> int:
    server = serve(args.batch, bind=args.bind, ui_dir=args.ui)
    print(f"viewer listening on http://{server.server_address[0]}:{server.port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="triage")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a pipeline from a YAML config")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--workers", type=int, default=0, help="0 = host CPU count")
    p_run.add_argument("--base-dir", default=None, help="override the config's folder")
    p_run.set_defaults(func=_cmd_run)

    p_rank = sub.add_parser("rank", help="rank videos in a scores batch")
    p_rank.add_argument("--batch", required=True)
    p_rank.add_argument("--threshold", type=float, default=0.25)
    p_rank.add_argument("--metric", choices=RANK_METRICS, default="positive_fraction")
    p_rank.set_defaults(func=_cmd_rank)

    p_eval = sub.add_parser("eval", help="ROC/PR evaluation against ground truth")
    p_eval.add_argument("--timelines", required=True)
    p_eval.add_argument("--truth", required=True, help="CSV of video_id,label")
    p_eval.add_argument("--metric", choices=("max_score", "positive_fraction"),
                        default="max_score")
    p_eval.add_argument("--frame-threshold", type=float, default=0.5)
    p_eval.add_argument("--plot", default=None, help="write an SVG of the ROC curve")
    p_eval.set_defaults(func=_cmd_eval)

    p_view = sub.add_parser("view", help="serve ranked timelines over HTTP")
    p_view.add_argument("--batch", required=True)
    p_view.add_argument("--bind", default="127.0.0.1:8080")
    p_view.add_argument("--ui", default=None, help="directory of built UI assets")
    p_view.set_defaults(func=_cmd_view)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TriageError as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
