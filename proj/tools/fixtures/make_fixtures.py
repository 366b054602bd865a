#!/usr/bin/env python3
"""Builds the evaluation fixture corpora under tests/fixtures/.

The corpora are synthesized from a hand-designed pooled confusion matrix so
that dataset-level (pooled) per-class Dice equals the published per-class
values exactly:

  machining tools: background 0.991, flank wear 0.695, chipping 0.244,
                   built-up edge 0.596 (mean 0.6315), pixel accuracy 0.977
  rotating anodes: normal surface 0.485, cracks 0.634, molten area 0.690
                   (mean 0.603)

Design of the machining matrix. With TP_c = d_c * 1000 * m_c the off-diagonal
mass of class c must be FN_c + FP_c = 2 * TP_c * (1 - d_c) / d_c. Taking
m = (698, 7, 7, 7) gives exactly 719000 pixels of which 16537 are errors,
i.e. accuracy 702463 / 719000 = 0.977. The off-diagonal entries below were
chosen by hand so that row sums (FN) and column sums (FP) both equal
(6282, 2135, 5292, 2828).

Design of the anode matrix. m = (100, 100, 100) gives TP = (48500, 63400,
69000) and FN = FP = (51500, 36600, 31000), 300000 pixels in total. Pooled
accuracy is a weighted mean of the per-class Dice terms, so the published
0.737 cannot be reached by pooled counting with these Dice values; the
fixture yields 0.603.

Pixel pairs are shuffled with a fixed seed and cut into the test images.
Train and validation records get small ground-truth-only masks. The script
reads every written file back and recomputes the metrics independently of
the C++ implementation before exiting.

Usage: python3 tools/fixtures/make_fixtures.py [output_dir]
"""

import json
import os
import sys

import numpy as np
from PIL import Image

SEED = 20230601

MACHINING = {
    "name": "machining",
    "class_map": "machining_tool",
    "classes": ["background", "flank_wear", "chipping", "built_up_edge"],
    "dice": [0.991, 0.695, 0.244, 0.596],
    # rows: ground truth, columns: prediction
    "confusion": [
        [691718, 835, 4411, 1036],
        [1000, 4865, 635, 500],
        [3000, 1000, 1708, 1292],
        [2282, 300, 246, 4172],
    ],
    "splits": {"train": 152, "validation": 10, "test": 51},
    "test_width": 100,
    "test_heights": [141] * 50 + [140],
}

ANODE = {
    "name": "anode",
    "class_map": "rotating_anode",
    "classes": ["normal_surface", "cracks", "molten_area"],
    "dice": [0.485, 0.634, 0.690],
    "confusion": [
        [48500, 30000, 21500],
        [27100, 63400, 9500],
        [24400, 6600, 69000],
    ],
    "splits": {"train": 1031, "validation": 37, "test": 38},
    "test_width": 100,
    "test_heights": [79] * 36 + [78] * 2,
}


def dice_from_confusion(conf):
    conf = np.asarray(conf, dtype=np.int64)
    out = []
    for c in range(conf.shape[0]):
        tp = conf[c, c]
        denom = conf[c, :].sum() + conf[:, c].sum()
        out.append(2.0 * tp / denom if denom else 1.0)
    return out


def write_png(path, grid):
    Image.fromarray(np.asarray(grid, dtype=np.uint8), mode="L").save(path, optimize=True)


def build(spec, root, rng):
    n_classes = len(spec["classes"])
    conf = np.asarray(spec["confusion"], dtype=np.int64)
    designed = dice_from_confusion(conf)
    for got, want in zip(designed, spec["dice"]):
        assert abs(got - want) < 1e-12, (spec["name"], got, want)

    gt_stream = np.repeat(np.repeat(np.arange(n_classes), n_classes), conf.ravel())
    pred_stream = np.repeat(np.tile(np.arange(n_classes), n_classes), conf.ravel())
    order = rng.permutation(gt_stream.size)
    gt_stream = gt_stream[order]
    pred_stream = pred_stream[order]

    width = spec["test_width"]
    heights = spec["test_heights"]
    assert sum(heights) * width == gt_stream.size, spec["name"]
    assert len(heights) == spec["splits"]["test"]

    base = os.path.join(root, spec["name"])
    for sub in ("gt", "pred"):
        os.makedirs(os.path.join(base, sub), exist_ok=True)

    records = []
    is_anode = spec["class_map"] == "rotating_anode"
    index = 0

    def patch_fields(k):
        if not is_anode:
            return {}
        track = "track-%02d" % (k % 12)
        slot = k // 12
        return {"patch_offset": [(slot % 50) * 100, (slot // 50) * 100], "track_id": track}

    counter = 0
    for role in ("train", "validation"):
        for _ in range(spec["splits"][role]):
            image_id = "%s-%s-%04d" % (spec["name"], role, counter)
            grid = rng.integers(0, n_classes, size=(8, 8))
            rel = "gt/%s.png" % image_id
            write_png(os.path.join(base, rel), grid)
            rec = {"image_id": image_id, "role": role, "gt": rel}
            rec.update(patch_fields(counter))
            records.append(rec)
            counter += 1

    for h in heights:
        image_id = "%s-test-%04d" % (spec["name"], counter)
        n = h * width
        gt = gt_stream[index:index + n].reshape(h, width)
        pred = pred_stream[index:index + n].reshape(h, width)
        index += n
        gt_rel = "gt/%s.png" % image_id
        pred_rel = "pred/%s.png" % image_id
        write_png(os.path.join(base, gt_rel), gt)
        write_png(os.path.join(base, pred_rel), pred)
        rec = {"image_id": image_id, "role": "test", "gt": gt_rel, "pred": pred_rel}
        rec.update(patch_fields(counter))
        records.append(rec)
        counter += 1

    manifest = {"schema_version": 1, "class_map": spec["class_map"], "records": records}
    with open(os.path.join(base, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=1)
        fh.write("\n")
    return base, manifest


def verify(spec, base, manifest):
    n_classes = len(spec["classes"])
    conf = np.zeros((n_classes, n_classes), dtype=np.int64)
    for rec in manifest["records"]:
        if rec["role"] != "test":
            continue
        gt = np.asarray(Image.open(os.path.join(base, rec["gt"])))
        pred = np.asarray(Image.open(os.path.join(base, rec["pred"])))
        for g, p in zip(gt.ravel(), pred.ravel()):
            conf[g, p] += 1
    # pooled Dice: 2 * sum(y*g) / (sum(y) + sum(g)), per class
    dice = []
    for c in range(n_classes):
        inter = conf[c, c]
        dice.append(2.0 * inter / (conf[:, c].sum() + conf[c, :].sum()))
    accuracy = np.trace(conf) / conf.sum()
    mean = sum(dice) / n_classes
    for got, want in zip(dice, spec["dice"]):
        assert abs(got - want) < 1e-12, (spec["name"], got, want)
    print("%-10s dice=%s mean=%.6f accuracy=%.6f pixels=%d"
          % (spec["name"], ["%.6f" % d for d in dice], mean, accuracy, conf.sum()))


def main():
    root = sys.argv[1] if len(sys.argv) > 1 else os.path.join(
        os.path.dirname(os.path.abspath(__file__)), "..", "..", "tests", "fixtures")
    rng = np.random.default_rng(SEED)
    for spec in (MACHINING, ANODE):
        base, manifest = build(spec, root, rng)
        verify(spec, base, manifest)


if __name__ == "__main__":
    main()
