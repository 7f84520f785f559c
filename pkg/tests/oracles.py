"""Independent reference implementations used to cross-check the metric code.

Deliberately written in the dumbest possible loop style, mirroring the
documented rules rather than the vectorized production paths. If these and
the production code agree, both implement the written contract.
"""

from __future__ import annotations

ORACLE_IOU_GRID = tuple(i / 100.0 for i in range(50, 100, 5))
ORACLE_RECALL_GRID = tuple(i / 100.0 for i in range(101))


def grid_iou(a, b, n: int = 400) -> float:
    """Pixel-membership brute force: sample an n*n grid of cell centers over
    the joint extent and count membership. Converges to the continuous IoU."""
    x0, y0 = min(a.x, b.x), min(a.y, b.y)
    x1 = max(a.x + a.w, b.x + b.w)
    y1 = max(a.y + a.h, b.y + b.h)
    inter = union = 0
    for i in range(n):
        py = y0 + (y1 - y0) * (i + 0.5) / n
        for j in range(n):
            px = x0 + (x1 - x0) * (j + 0.5) / n
            in_a = a.x <= px < a.x + a.w and a.y <= py < a.y + a.h
            in_b = b.x <= px < b.x + b.w and b.y <= py < b.y + b.h
            if in_a and in_b:
                inter += 1
            if in_a or in_b:
                union += 1
    return inter / union if union else 0.0


def _overlap(a0: float, a1: float, b0: float, b1: float) -> float:
    lo = a0 if a0 > b0 else b0
    hi = a1 if a1 < b1 else b1
    return hi - lo if hi > lo else 0.0


def exact_iou(a, b) -> float:
    w = _overlap(a.x, a.x + a.w, b.x, b.x + b.w)
    h = _overlap(a.y, a.y + a.h, b.y, b.y + b.h)
    inter = w * h
    if inter == 0.0:
        return 0.0
    return inter / (a.w * a.h + b.w * b.h - inter)


def rank_order(dets) -> list[int]:
    """Descending confidence; ties by image id, then box geometry, then
    class id — the documented content-based tie-break."""
    keyed = []
    for i, d in enumerate(dets):
        keyed.append(((-d.confidence, d.image, d.bbox.x, d.bbox.y,
                       d.bbox.w, d.bbox.h, d.class_id), i))
    keyed.sort(key=lambda pair: pair[0])
    return [i for _, i in keyed]


def oracle_match(dets, gts, iou_threshold: float):
    """Greedy matching, single image and class: returns (pairs, fps, fns)."""
    pairs = []
    fps = []
    taken = set()
    for di in rank_order(dets):
        best_j = None
        best_v = -1.0
        for j in range(len(gts)):
            if j in taken:
                continue
            v = exact_iou(dets[di].bbox, gts[j].bbox)
            if v >= iou_threshold and v > best_v:
                best_j, best_v = j, v
        if best_j is None:
            fps.append(di)
        else:
            taken.add(best_j)
            pairs.append((di, best_j, best_v))
    fns = [j for j in range(len(gts)) if j not in taken]
    return pairs, fps, fns


def oracle_ap(flags, num_gt: int):
    """Prefix enumeration: make every (recall, precision) point, then take
    the envelope maximum at each of the 101 recall grid stops."""
    if num_gt == 0:
        return None
    points = []
    tp = fp = 0
    for flag in flags:
        if flag:
            tp += 1
        else:
            fp += 1
        points.append((tp / num_gt, tp / (tp + fp)))
    total = 0.0
    for r in ORACLE_RECALL_GRID:
        best = 0.0
        for recall, precision in points:
            if recall >= r and precision > best:
                best = precision
        total += best
    return total / 101.0


def oracle_class_flags(dets, gts, iou_threshold: float) -> list[bool]:
    """Ranked hit/miss flags for one class across images: detections walk in
    global rank order, each matching within its own image."""
    taken = set()
    flags = []
    for di in rank_order(dets):
        d = dets[di]
        best_j = None
        best_v = -1.0
        for j in range(len(gts)):
            if j in taken or gts[j].image != d.image:
                continue
            v = exact_iou(d.bbox, gts[j].bbox)
            if v >= iou_threshold and v > best_v:
                best_j, best_v = j, v
        if best_j is None:
            flags.append(False)
        else:
            taken.add(best_j)
            flags.append(True)
    return flags


def oracle_evaluate(dets, gts, conf_threshold: float = 0.25) -> dict:
    """Full composition: per-class AP over the IoU grid, means, and the
    operating-point precision/recall at IoU 0.50."""
    classes = sorted({g.class_id for g in gts} | {d.class_id for d in dets})
    per_class = {}
    for c in classes:
        dc = [d for d in dets if d.class_id == c]
        gc = [g for g in gts if g.class_id == c]
        aps = {}
        for thr in ORACLE_IOU_GRID:
            if not gc:
                aps[thr] = None
            else:
                aps[thr] = oracle_ap(oracle_class_flags(dc, gc, thr), len(gc))
        per_class[c] = aps

    defined = [c for c in classes if per_class[c][0.5] is not None]
    if defined:
        class_means = []
        ap50s = []
        for c in defined:
            vals = [per_class[c][t] for t in ORACLE_IOU_GRID]
            class_means.append(sum(vals) / len(vals))
            ap50s.append(per_class[c][0.5])
        map_all = sum(class_means) / len(class_means)
        map50 = sum(ap50s) / len(ap50s)
    else:
        map_all = map50 = 0.0

    tp = fp = fn = 0
    strong = [d for d in dets if d.confidence >= conf_threshold]
    for c in classes:
        dc = [d for d in strong if d.class_id == c]
        gc = [g for g in gts if g.class_id == c]
        for image in sorted({d.image for d in dc} | {g.image for g in gc}):
            pairs, fps, fns = oracle_match(
                [d for d in dc if d.image == image],
                [g for g in gc if g.image == image], 0.5)
            tp += len(pairs)
            fp += len(fps)
            fn += len(fns)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    return {"map": map_all, "map50": map50, "precision": precision,
            "recall": recall, "tp": tp, "fp": fp, "fn": fn,
            "per_class": per_class}
