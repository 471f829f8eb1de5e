"""Classifier evaluation: ROC curve and AUC, precision/recall, threshold
sweeps over per-video timelines.

roc_auc follows the Mann-Whitney formulation — the probability a random
positive outscores a random negative, ties credited 0.5. Win/tie counts are
accumulated as integers so the result is exact up to one final division and
agrees with a brute-force pair count bit for bit.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .errors import DegenerateLabels, MissingGroundTruth, NoPositives
from .timeline import Timeline

LabeledScores = list[tuple[float, bool]]  # (score, is_positive)


@dataclass(frozen=True)
class CurvePoint:
    x: float
    y: float
    threshold: float


def _split(data: LabeledScores) -> tuple[list[float], list[float]]:
    pos = [float(s) for s, is_pos in data if is_pos]
    neg = [float(s) for s, is_pos in data if not is_pos]
    return pos, neg


def roc_auc(data: LabeledScores) -> float:
    """Mean over (positive, negative) pairs of 1[s_p > s_n] + 0.5 * 1[s_p == s_n]."""
    pos, neg = _split(data)
    if not pos or not neg:
        raise DegenerateLabels("ROC-AUC needs at least one positive and one negative")
    pos_counts = Counter(pos)
    neg_counts = Counter(neg)
    wins = 0
    ties = 0
    pos_below = 0
    for score in sorted(set(pos_counts) | set(neg_counts)):
        p_here = pos_counts.get(score, 0)
        n_here = neg_counts.get(score, 0)
        wins += n_here * (len(pos) - pos_below - p_here)
        ties += p_here * n_here
        pos_below += p_here
    return (2 * wins + ties) / (2 * len(pos) * len(neg))


def roc_curve(data: LabeledScores) -> list[CurvePoint]:
    """(FPR, TPR) at every distinct score threshold, descending, with the
    (0,0) sentinel first; trapezoidal area equals roc_auc."""
    pos, neg = _split(data)
    if not pos or not neg:
        raise DegenerateLabels("ROC curve needs at least one positive and one negative")
    points = [CurvePoint(0.0, 0.0, float("inf"))]
    pos_counts = Counter(pos)
    neg_counts = Counter(neg)
    tp = fp = 0
    for score in sorted(set(pos_counts) | set(neg_counts), reverse=True):
        tp += pos_counts.get(score, 0)
        fp += neg_counts.get(score, 0)
        points.append(CurvePoint(fp / len(neg), tp / len(pos), score))
    return points


def trapezoid_area(points: list[CurvePoint]) -> float:
    area = 0.0
    for prev, cur in zip(points, points[1:]):
        area += (cur.x - prev.x) * (cur.y + prev.y) / 2.0
    return area


def pr_curve(data: LabeledScores) -> list[CurvePoint]:
    """(recall, precision) at every distinct score threshold, descending."""
    pos, neg = _split(data)
    if not pos:
        raise NoPositives("precision/recall needs at least one positive")
    pos_counts = Counter(pos)
    neg_counts = Counter(neg)
    points: list[CurvePoint] = []
    tp = fp = 0
    for score in sorted(set(pos_counts) | set(neg_counts), reverse=True):
        tp += pos_counts.get(score, 0)
        fp += neg_counts.get(score, 0)
        points.append(CurvePoint(tp / len(pos), tp / (tp + fp), score))
    return points


def average_precision(data: LabeledScores) -> float:
    """Step-wise interpolation: sum of (R_k - R_{k-1}) * P_k."""
    points = pr_curve(data)
    ap = 0.0
    prev_recall = 0.0
    for point in points:
        ap += (point.x - prev_recall) * point.y
        prev_recall = point.x
    return ap


SWEEP_METRICS = ("positive_fraction", "max_score")


def threshold_sweep(
    timelines: list[Timeline],
    ground_truth: dict[str, bool],
    metric: str = "max_score",
    frame_threshold: float = 0.5,
) -> LabeledScores:
    """One (aggregate score, truth) entry per video, for video-level AUC.

    positive_fraction aggregates at frame_threshold; max_score ignores it.
    """
    if metric not in SWEEP_METRICS:
        raise ValueError(f"unknown sweep metric: {metric!r}")
    data: LabeledScores = []
    for t in timelines:
        if t.video_id not in ground_truth:
            raise MissingGroundTruth(f"no ground-truth label for video {t.video_id!r}")
        if metric == "max_score":
            value = t.max_score()
        else:
            value = t.positive_fraction(frame_threshold)
        data.append((value, bool(ground_truth[t.video_id])))
    return data


def curve_to_svg(points: list[CurvePoint], title: str = "", size: int = 400) -> str:
    """Minimal standalone SVG rendering of a curve in the unit square."""
    pad = 40
    span = size - 2 * pad

    def sx(x: float) -> float:
        return pad + x * span

    def sy(y: float) -> float:
        return size - pad - y * span

    path = " ".join(f"{sx(p.x):.2f},{sy(p.y):.2f}" for p in points)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">\n'
        f'  <rect x="{pad}" y="{pad}" width="{span}" height="{span}" '
        f'fill="white" stroke="#999"/>\n'
        f'  <line x1="{sx(0):.2f}" y1="{sy(0):.2f}" x2="{sx(1):.2f}" y2="{sy(1):.2f}" '
        f'stroke="#ccc" stroke-dasharray="4"/>\n'
        f'  <polyline points="{path}" fill="none" stroke="#c22" stroke-width="2"/>\n'
        f'  <text x="{size / 2:.0f}" y="{pad / 2:.0f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{title}</text>\n'
        "</svg>\n"
    )
