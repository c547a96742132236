#!/usr/bin/env python3
"""Smoke test for the `_poev2` native extension.

Builds nothing itself: run `cargo build -p poev2-python` (or `--release`)
first. The script locates the cdylib, stages it under an importable name,
and drives the main types and operations end to end.
"""

import math
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def stage_module() -> Path:
    candidates = [
        REPO / "target" / profile / "lib_poev2.so"
        for profile in ("release", "debug")
    ]
    lib = next((p for p in candidates if p.exists()), None)
    if lib is None:
        print("building extension (cargo build -p poev2-python)...")
        subprocess.run(
            ["cargo", "build", "-p", "poev2-python"], cwd=REPO, check=True
        )
        lib = candidates[1]
    stage = Path(tempfile.mkdtemp(prefix="poev2_py_"))
    shutil.copy2(lib, stage / "_poev2.so")
    return stage


sys.path.insert(0, str(stage_module()))
import _poev2 as poev2  # noqa: E402


def check(name: str, condition: bool) -> None:
    status = "ok" if condition else "FAILED"
    print(f"  {name}: {status}")
    if not condition:
        sys.exit(1)


def main() -> None:
    print("map construction and i/o")
    m = poev2.EdgeStrengthMap.zeros(64, 48)
    m.set(10, 20, 0.75)
    check("dims", (m.width, m.height) == (64, 48))
    check("get/set", m.get(10, 20) == 0.75)
    with tempfile.TemporaryDirectory() as d:
        path = str(Path(d) / "m.pgm")
        m.save_pgm(path)
        back = poev2.EdgeStrengthMap.load(path)
        check("pgm round trip", abs(back.get(10, 20) - 191 / 255) < 1e-9)
    binary = m.binarize(0.5)
    check("binarize", binary.get(10, 20) == 1.0 and binary.get(0, 0) == 0.0)

    print("parameter validation")
    params = poev2.DetectionParams.generic()
    check("generic preset", params.lambda == 0.1 and params.search == 5)
    wire = poev2.DetectionParams.wireframe()
    check("wireframe preset", wire.lambda == 0.8 and wire.search == 3)
    try:
        poev2.DetectionParams(lambda_=2.0)  # keyword is `lambda`
        bad_rejected = False
    except (ValueError, TypeError):
        bad_rejected = True
    check("bad params rejected", bad_rejected)

    print("closed-form threshold")
    check(
        "l_min(512, 512)",
        abs(poev2.l_min(512, 512) - 18.633251042038678) < 1e-9,
    )

    print("synthetic detection round trip")
    emap, gt = poev2.generate_scene(
        width=256, height=256, min_segments=4, max_segments=7,
        min_length=30.0, max_length=80.0, seed=7,
    )
    check("scene has ground truth", len(gt) >= 4)
    detections = poev2.detect(emap, params)
    check("detected something", len(detections) >= 1)
    p, r, f = poev2.heatmap_scores(
        detections, gt, emap.width, emap.height
    )
    print(f"  precision={p:.4f} recall={r:.4f} F^H={f:.4f}")
    check("F^H >= 0.95", f >= 0.95)
    sap = poev2.structural_ap(gt, gt, emap.width, emap.height)
    check("sAP self-match", sap == 1.0)

    print("segment properties and serialization")
    seg = detections[0]
    check("finite endpoints", all(
        math.isfinite(v) for v in (seg.x1, seg.y1, seg.x2, seg.y2)
    ))
    check("angle in [0, pi)", 0.0 <= seg.angle() < math.pi)
    check("score is support size", seg.score > 0)
    with tempfile.TemporaryDirectory() as d:
        path = str(Path(d) / "segs.txt")
        poev2.write_segments(path, detections)
        loaded = poev2.read_segments(path)
        check("text round trip count", len(loaded) == len(detections))

    print("all smoke tests passed")


if __name__ == "__main__":
    main()
