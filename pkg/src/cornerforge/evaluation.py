"""Detection metrics and the real-vs-synthetic comparison report.

Conventions (stated in every report header): 101-point interpolated average
precision with the precision envelope, IoU thresholds 0.50:0.05:0.95, and an
explicit operating point (IoU 0.50, confidence >= report threshold) for the
single precision/recall numbers. Classes with no ground truth have undefined
AP and are excluded from the means.

Determinism: detections are ranked by descending confidence with ties broken
by content (image id, then box geometry), so a report never depends on the
input order of equal-confidence detections; exact duplicates are
interchangeable. Ground-truth candidates tie-break by input order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ClassSetMismatch, MalformedInput, UnknownClass
from .imaging import BBox

IOU_GRID = tuple(round(0.50 + 0.05 * i, 2) for i in range(10))
DEFAULT_CONFIDENCE_THRESHOLD = 0.25
CONVENTIONS = ("101-point interpolated AP with precision envelope; "
               "IoU grid 0.50:0.05:0.95; classes without ground truth "
               "excluded from means")

# Published detector scores on a real-image test set vs one bootstrapped with
# this kind of pipeline. Fixed reference numbers for side-by-side display —
# nothing in this package reproduces them.
REFERENCE_BASELINE = {
    "real": {"map": 0.701, "map50": 0.805, "precision": 0.866, "recall": 0.654},
    "synthetic": {"map": 0.329, "map50": 0.600, "precision": 0.542, "recall": 0.713},
}
METRIC_KEYS = ("map", "map50", "precision", "recall")


def _as_box(b) -> BBox:
    """Accept a BBox or any (x, y, w, h) sequence."""
    if isinstance(b, BBox):
        return b
    x, y, w, h = b
    return BBox(float(x), float(y), float(w), float(h))


@dataclass(frozen=True)
class Detection:
    image: str
    class_id: int
    bbox: BBox
    confidence: float

    def __post_init__(self):
        object.__setattr__(self, "bbox", _as_box(self.bbox))
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")


@dataclass(frozen=True)
class GroundTruthBox:
    image: str
    class_id: int
    bbox: BBox

    def __post_init__(self):
        object.__setattr__(self, "bbox", _as_box(self.bbox))


def iou(a: BBox, b: BBox) -> float:
    """Intersection over union with continuous box semantics; symmetric."""
    a, b = _as_box(a), _as_box(b)
    iw = min(a.x + a.w, b.x + b.w) - max(a.x, b.x)
    ih = min(a.y + a.h, b.y + b.h) - max(a.y, b.y)
    if iw <= 0.0 or ih <= 0.0:
        return 0.0
    inter = iw * ih
    return inter / (a.area + b.area - inter)


def _rank_key(det: Detection):
    # descending confidence; content-based tie-break keeps reports invariant
    # under permutation of equal-confidence inputs
    return (-det.confidence, det.image, det.bbox.x, det.bbox.y,
            det.bbox.w, det.bbox.h, det.class_id)


@dataclass(frozen=True)
class MatchResult:
    pairs: list          # (detection index, ground-truth index, iou)
    unmatched_dets: list  # detection indexes -> false positives
    unmatched_gts: list   # ground-truth indexes -> false negatives


def match_detections(dets: list[Detection], gts: list[GroundTruthBox],
                     iou_threshold: float) -> MatchResult:
    """Greedy one-image, one-class matching.

    Detections are taken in rank order; each claims the so-far-unmatched
    ground truth with the highest IoU >= threshold (IoU ties: lowest
    ground-truth index). Every ground truth is matched at most once.
    """
    order = sorted(range(len(dets)), key=lambda i: _rank_key(dets[i]))
    taken = [False] * len(gts)
    pairs, fps = [], []
    for di in order:
        best_j, best_iou = -1, -1.0
        for j, g in enumerate(gts):
            if taken[j]:
                continue
            v = iou(dets[di].bbox, g.bbox)
            if v >= iou_threshold and v > best_iou:
                best_j, best_iou = j, v
        if best_j >= 0:
            taken[best_j] = True
            pairs.append((di, best_j, best_iou))
        else:
            fps.append(di)
    fns = [j for j, t in enumerate(taken) if not t]
    return MatchResult(pairs=pairs, unmatched_dets=fps, unmatched_gts=fns)


def average_precision(flags: list[bool], num_gt: int) -> float | None:
    """AP from confidence-ranked hit/miss flags.

    101-point rule: AP = mean over r in {0.00, 0.01, ..., 1.00} of the
    envelope precision max{p_i : recall_i >= r} (0 where unreachable).
    num_gt == 0 leaves AP undefined (None) — the class cannot contribute.
    """
    if num_gt < 0:
        raise ValueError("num_gt must be >= 0")
    if num_gt == 0:
        return None
    hits = np.asarray(flags, dtype=bool)
    if hits.size == 0:
        return 0.0
    tp = np.cumsum(hits)
    precision = tp / np.arange(1, hits.size + 1)
    recall = tp / num_gt
    total = 0.0
    for i in range(101):
        reachable = recall >= (i / 100.0)
        if reachable.any():
            total += float(precision[reachable].max())
    return total / 101.0


def _class_flags(dets: list[Detection], gts: list[GroundTruthBox],
                 threshold: float) -> list[bool]:
    """Ranked TP/FP flags for one class across all images."""
    gt_by_image: dict[str, list[int]] = {}
    for j, g in enumerate(gts):
        gt_by_image.setdefault(g.image, []).append(j)
    order = sorted(range(len(dets)), key=lambda i: _rank_key(dets[i]))
    taken = [False] * len(gts)
    flags = []
    for di in order:
        d = dets[di]
        best_j, best_iou = -1, -1.0
        for j in gt_by_image.get(d.image, ()):
            if taken[j]:
                continue
            v = iou(d.bbox, gts[j].bbox)
            if v >= threshold and v > best_iou:
                best_j, best_iou = j, v
        if best_j >= 0:
            taken[best_j] = True
            flags.append(True)
        else:
            flags.append(False)
    return flags


@dataclass
class ClassEval:
    class_id: int
    name: str | None
    num_gt: int
    ap_by_iou: dict[float, float | None]

    @property
    def ap(self) -> float | None:
        vals = [v for v in self.ap_by_iou.values() if v is not None]
        return sum(vals) / len(vals) if vals else None

    @property
    def ap50(self) -> float | None:
        return self.ap_by_iou[IOU_GRID[0]]

    def to_dict(self) -> dict:
        return {"class_id": self.class_id, "name": self.name,
                "num_gt": self.num_gt,
                "ap_by_iou": {f"{t:.2f}": v for t, v in self.ap_by_iou.items()},
                "ap": self.ap, "ap50": self.ap50}


@dataclass
class EvalReport:
    map: float
    map50: float
    precision: float
    recall: float
    tp: int
    fp: int
    fn: int
    per_class: dict[int, ClassEval]
    report_confidence_threshold: float
    flags: list[str] = field(default_factory=list)
    conventions: str = CONVENTIONS

    def metrics(self) -> dict[str, float]:
        return {"map": self.map, "map50": self.map50,
                "precision": self.precision, "recall": self.recall}

    def to_dict(self) -> dict:
        return {
            "conventions": self.conventions,
            "iou_grid": list(IOU_GRID),
            "report_confidence_threshold": self.report_confidence_threshold,
            **self.metrics(),
            "counts": {"tp": self.tp, "fp": self.fp, "fn": self.fn},
            "per_class": {str(cid): ce.to_dict()
                          for cid, ce in sorted(self.per_class.items())},
            "flags": list(self.flags),
        }

    def to_text(self) -> str:
        def fmt(v):
            return "   -  " if v is None else f"{v:.4f}"

        lines = [
            f"detection evaluation ({self.conventions})",
            f"operating point: IoU 0.50, confidence >= "
            f"{self.report_confidence_threshold:g}",
            "",
            f"{'class':>24}  {'num_gt':>6}  {'AP@50':>6}  {'AP':>6}",
        ]
        for cid in sorted(self.per_class):
            ce = self.per_class[cid]
            label = ce.name if ce.name is not None else f"class {cid}"
            lines.append(f"{label:>24}  {ce.num_gt:>6}  {fmt(ce.ap50)}  {fmt(ce.ap)}")
        lines += [
            "",
            f"mAP        {self.map:.4f}",
            f"mAP@50     {self.map50:.4f}",
            f"precision  {self.precision:.4f}  (TP {self.tp} / FP {self.fp})",
            f"recall     {self.recall:.4f}  (TP {self.tp} / FN {self.fn})",
        ]
        for flag in self.flags:
            lines.append(f"note: {flag}")
        return "\n".join(lines) + "\n"


def _resolve_names(class_names, classes: list[int]) -> dict[int, str | None]:
    if class_names is None:
        return {c: None for c in classes}
    if isinstance(class_names, dict):
        table = dict(class_names)
    else:
        table = dict(enumerate(class_names))
    for c in classes:
        if c not in table:
            raise UnknownClass(f"class id {c} has no name in the class table")
    return {c: table[c] for c in classes}


def evaluate(detections: list[Detection], ground_truth: list[GroundTruthBox],
             report_confidence_threshold: float = DEFAULT_CONFIDENCE_THRESHOLD,
             class_names=None) -> EvalReport:
    """Score detections against ground truth.

    mAP averages per-class AP over the IoU grid; mAP@50 uses the 0.50 entry.
    The single precision/recall pair counts matches at IoU 0.50 over
    detections with confidence >= the report threshold. Empty ground truth
    still produces a report, with the undefined metrics flagged and zeroed.
    """
    classes = sorted({g.class_id for g in ground_truth}
                     | {d.class_id for d in detections})
    names = _resolve_names(class_names, classes)
    flags: list[str] = []
    if not ground_truth:
        flags.append("empty ground truth: AP and recall undefined, reported as 0.0")

    per_class: dict[int, ClassEval] = {}
    for c in classes:
        dets_c = [d for d in detections if d.class_id == c]
        gts_c = [g for g in ground_truth if g.class_id == c]
        ap_by_iou = {
            thr: average_precision(_class_flags(dets_c, gts_c, thr), len(gts_c))
            for thr in IOU_GRID
        }
        per_class[c] = ClassEval(class_id=c, name=names[c], num_gt=len(gts_c),
                                 ap_by_iou=ap_by_iou)

    defined = [ce for ce in per_class.values() if ce.ap is not None]
    if defined:
        map_all = sum(ce.ap for ce in defined) / len(defined)
        map50 = sum(ce.ap50 for ce in defined) / len(defined)
    else:
        map_all = map50 = 0.0
        if ground_truth:
            flags.append("no class has defined AP")

    # operating point: confidence-filtered greedy matching at IoU 0.50
    strong = [d for d in detections
              if d.confidence >= report_confidence_threshold]
    tp = fp = fn = 0
    for c in classes:
        dets_c = [d for d in strong if d.class_id == c]
        gts_c = [g for g in ground_truth if g.class_id == c]
        images = sorted({d.image for d in dets_c} | {g.image for g in gts_c})
        for image in images:
            res = match_detections([d for d in dets_c if d.image == image],
                                   [g for g in gts_c if g.image == image],
                                   iou_threshold=0.5)
            tp += len(res.pairs)
            fp += len(res.unmatched_dets)
            fn += len(res.unmatched_gts)

    if tp + fp > 0:
        precision = tp / (tp + fp)
    else:
        precision = 0.0
        flags.append("precision undefined: no detections at the report "
                     "threshold, reported as 0.0")
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0

    return EvalReport(map=map_all, map50=map50, precision=precision,
                      recall=recall, tp=tp, fp=fp, fn=fn, per_class=per_class,
                      report_confidence_threshold=report_confidence_threshold,
                      flags=flags)


# ---------------------------------------------------------------------------
# real vs synthetic comparison

def _metrics_of(report) -> dict[str, float]:
    if isinstance(report, EvalReport):
        return report.metrics()
    missing = [k for k in METRIC_KEYS if k not in report]
    if missing:
        raise MalformedInput(f"metric table is missing {missing}")
    return {k: float(report[k]) for k in METRIC_KEYS}


def domain_gap_report(real, synth) -> dict:
    """Side-by-side metric table with deltas (synthetic - real).

    Accepts EvalReports or plain metric mappings (map/map50/precision/recall),
    so published numbers can be compared without re-running anything. Deltas
    are rounded to 9 decimals to strip binary noise from decimal inputs.
    """
    if isinstance(real, EvalReport) and isinstance(synth, EvalReport):
        if set(real.per_class) != set(synth.per_class):
            raise ClassSetMismatch(
                f"class sets differ: {sorted(real.per_class)} vs "
                f"{sorted(synth.per_class)}")
    r, s = _metrics_of(real), _metrics_of(synth)
    return {
        "real": r,
        "synthetic": s,
        "delta": {k: round(s[k] - r[k], 9) for k in METRIC_KEYS},
    }


def format_domain_gap(doc: dict) -> str:
    labels = {"map": "mAP", "map50": "mAP@50",
              "precision": "precision", "recall": "recall"}
    lines = [f"{'metric':>10}  {'real':>8}  {'synthetic':>9}  {'delta':>8}"]
    for k in METRIC_KEYS:
        lines.append(f"{labels[k]:>10}  {doc['real'][k]:>8.3f}  "
                     f"{doc['synthetic'][k]:>9.3f}  {doc['delta'][k]:>+8.3f}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# input loading

def _parse_box(payload: dict, where: str, need_conf: bool):
    for key in ("image", "class_id", "bbox"):
        if key not in payload:
            raise MalformedInput(f"{where}: missing key {key!r}")
    bbox = payload["bbox"]
    if not isinstance(bbox, list) or len(bbox) != 4:
        raise MalformedInput(f"{where}: bbox must be [x, y, w, h]")
    if need_conf and "conf" not in payload:
        raise MalformedInput(f"{where}: missing key 'conf'")
    try:
        box = BBox(*(float(v) for v in bbox))
        image = str(payload["image"])
        class_id = int(payload["class_id"])
        if need_conf:
            return Detection(image=image, class_id=class_id, bbox=box,
                             confidence=float(payload["conf"]))
        return GroundTruthBox(image=image, class_id=class_id, bbox=box)
    except (TypeError, ValueError) as exc:
        raise MalformedInput(f"{where}: {exc}") from exc


def _load_jsonl(path: str | Path, need_conf: bool) -> list:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            where = f"{path}:{lineno}"
            try:
                payload = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedInput(f"{where}: invalid JSON ({exc.msg})") from exc
            if not isinstance(payload, dict):
                raise MalformedInput(f"{where}: expected a JSON object")
            out.append(_parse_box(payload, where, need_conf))
    return out


def load_detections_jsonl(path: str | Path) -> list[Detection]:
    """One detection per line: {"image","class_id","bbox":[x,y,w,h],"conf"}."""
    return _load_jsonl(path, need_conf=True)


def load_ground_truth_jsonl(path: str | Path) -> list[GroundTruthBox]:
    """Same line shape as detections, without the confidence."""
    return _load_jsonl(path, need_conf=False)


def load_ground_truth_coco(path: str | Path) -> list[GroundTruthBox]:
    """Ground truth from a dataset run's annotations.json."""
    from .dataset import import_coco

    try:
        annotations, _ = import_coco(path)
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise MalformedInput(f"{path}: not a readable annotation export "
                             f"({exc})") from exc
    return [GroundTruthBox(image=a.image_id, class_id=a.class_id, bbox=a.bbox)
            for a in annotations]
