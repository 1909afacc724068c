#!/usr/bin/env python3
"""Smoke test for the _clustrack extension module.

Builds are done with cargo (`cargo build -p clustrack-python`); this script
locates the resulting cdylib, imports it under its module name and exercises
the exposed surface end to end.
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]


def load_module():
    candidates = [
        ROOT / "target" / "release" / "lib_clustrack.so",
        ROOT / "target" / "debug" / "lib_clustrack.so",
        ROOT / "target" / "release" / "_clustrack.dylib",
        ROOT / "target" / "debug" / "_clustrack.dylib",
    ]
    built = [p for p in candidates if p.exists()]
    if not built:
        sys.exit(
            "extension not built; run `cargo build -p clustrack-python` first"
        )
    src = max(built, key=lambda p: p.stat().st_mtime)
    stage = Path(tempfile.mkdtemp(prefix="clustrack_py_"))
    shutil.copy(src, stage / "_clustrack.so")
    sys.path.insert(0, str(stage))
    import _clustrack

    return _clustrack


def approx(a, b, tol=1e-9):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    ct = load_module()
    checks = 0

    # geometry
    a = ct.BBox(0.0, 0.0, 2.0, 2.0)
    b = ct.BBox(1.0, 1.0, 2.0, 2.0)
    approx(ct.iou(a, a), 1.0)
    approx(ct.iou(a, b), 1.0 / 7.0)
    approx(ct.giou(a, b), 1.0 / 7.0 - 2.0 / 9.0)
    approx(ct.modulated_giou(a, b, "diag"), 68.0 / 63.0)
    wide = ct.BBox(0.0, 0.0, 4.0, 2.0)
    nested = ct.BBox(0.0, 0.0, 2.0, 2.0)
    approx(ct.modulated_giou(wide, nested, "width"), 0.75)
    approx(ct.spatial_modulation(0.0, 0.525), 0.525)
    approx(ct.spatial_modulation(2.0, 0.1), 1.0)
    approx(a.area(), 4.0)
    approx(a.diagonal(), math.sqrt(8.0))
    checks += 9
    print("PASS geometry")

    # appearance helpers
    approx(ct.cosine_distance([1.0, 0.0], [0.0, 1.0]), 1.0, 1e-6)
    approx(ct.cosine_distance([1.0, 0.0], [-1.0, 0.0]), 2.0, 1e-6)
    approx(ct.adaptive_beta(1.0, 0.7, 0.822), 0.822, 1e-12)
    approx(ct.adaptive_beta(0.7, 0.7, 0.822), 1.0, 1e-12)
    approx(ct.adaptive_beta(0.85, 0.7, 0.822), 0.911, 1e-12)
    try:
        ct.cosine_distance([0.0, 0.0], [1.0, 0.0])
    except ValueError:
        pass
    else:
        raise AssertionError("zero-norm embedding must raise")
    checks += 6
    print("PASS appearance")

    # config presets
    cfg = ct.TrackerConfig.preset("mot17")
    approx(cfg.beta_f, 0.822)
    approx(cfg.off, 0.525)
    approx(cfg.sigma, 0.7)
    assert cfg.n == 9 and cfg.window == 6
    assert cfg.appearance == "dynamic" and cfg.spatial == "dgiou"
    base = ct.TrackerConfig.baseline()
    assert base.appearance == "median" and base.spatial == "iou" and base.n == 2
    dance = ct.TrackerConfig.preset("dancetrack")
    approx(dance.off, 0.1)
    checks += 8
    print("PASS config")

    # in-memory tracking: two targets, one with a 3-frame gap
    e0 = [1.0, 0.0, 0.0, 0.0]
    e1 = [0.0, 1.0, 0.0, 0.0]
    dets = []
    for f in range(1, 25):
        dets.append((f, (5.0 * f, 100.0, 30.0, 60.0), 0.9, e0))
        if not 10 <= f <= 12:
            dets.append((f, (900.0 - 5.0 * f, 400.0, 40.0, 70.0), 0.9, e1))
    rows = ct.track(dets, cfg)
    ids = sorted({r[1] for r in rows})
    assert ids == [1, 2], f"expected two trajectories, got {ids}"
    assert len(rows) == len(dets), "every detection must be assigned"
    checks += 2
    print("PASS tracking (in-memory)")

    # file round trip: synth -> track -> eval on a clean scenario
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        scenario = tmp / "scenario.toml"
        scenario.write_text("n_targets = 4\nn_frames = 50\nseed = 17\n")
        gt, det, emb = ct.generate_scenario(str(scenario), str(tmp / "data"))
        out = tmp / "res.txt"
        n_tracks = ct.track_files(det, emb, str(out), cfg)
        assert n_tracks == 4, f"expected 4 trajectories, got {n_tracks}"
        scores = ct.evaluate_files(gt, str(out))
        approx(scores["mota"], 1.0)
        approx(scores["idf1"], 1.0)
        assert scores["idsw"] == 0.0
        checks += 4
    print("PASS files (synth -> track -> eval)")

    print(f"OK: {checks} checks passed")


if __name__ == "__main__":
    main()
