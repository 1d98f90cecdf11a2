#!/usr/bin/env python3
"""Smoke test for the fdaclass_py extension module.

Builds the extension if needed, imports it from the cargo target
directory, and exercises distances, smoothing, simulation, classifier
fitting, the plug-in Bayes rule and CSV round-tripping.

Run from the repository root:  python3 python/smoke_test.py
"""

import math
import os
import shutil
import subprocess
import sys
import tempfile

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def load_module():
    candidates = [
        os.path.join(REPO_ROOT, "target", profile, "libfdaclass_py.so")
        for profile in ("release", "debug")
    ]
    so = next((p for p in candidates if os.path.exists(p)), None)
    if so is None:
        print("building fdaclass-py (cargo build -p fdaclass-py --release) ...")
        subprocess.run(
            ["cargo", "build", "-p", "fdaclass-py", "--release"],
            cwd=REPO_ROOT,
            check=True,
        )
        so = candidates[0]
    stage = tempfile.mkdtemp(prefix="fdaclass_py_")
    shutil.copy(so, os.path.join(stage, "fdaclass_py.so"))
    sys.path.insert(0, stage)
    import fdaclass_py

    return fdaclass_py


def approx(a, b, tol=1e-9):
    assert abs(a - b) < tol, f"{a} != {b} (tol {tol})"


def main():
    fp = load_module()

    # distances
    nodes = [0.0, 0.5, 1.0]
    approx(fp.sup_distance([1.0, -3.0, 2.0], [0.0, 0.0, 0.0], nodes), 3.0)
    approx(fp.l2_distance([1.0, 1.0, 1.0], [0.0, 0.0, 0.0], nodes), 1.0)

    # regression function
    approx(fp.eta(1.0, 0.5), 0.5)
    approx(fp.eta(3.0, 0.5), 0.25)

    # smoothing reduces the wiggliness of a noisy curve
    n = 40
    grid40 = [i / (n - 1) for i in range(n)]
    noisy = [math.sin(4.0 * t) + 0.5 * math.cos(57.0 * t * t) for t in grid40]
    smooth = fp.smooth_spline(noisy, grid40, 10)
    tv = lambda xs: sum(abs(b - a) for a, b in zip(xs, xs[1:]))
    assert tv(smooth) < tv(noisy), "smoothing should reduce total variation"

    # simulate + classify, first Gaussian model
    nodes1, train_curves, train_labels = fp.simulate(1, 30, nodes=31, seed=11)
    _, test_curves, test_labels = fp.simulate(1, 25, nodes=31, seed=12)
    clf = fp.Classifier.fit("knn-l2", nodes1, train_curves, train_labels)
    preds = clf.predict(test_curves)
    acc = sum(p == t for p, t in zip(preds, test_labels)) / len(test_labels)
    print(f"knn-l2 ({clf.params}, loo {clf.loo_accuracy:.3f}): test accuracy {acc:.3f}")
    assert acc > 0.6, f"knn accuracy too low: {acc}"

    # plug-in Bayes rule should do at least comparably
    bayes_preds = fp.model1_bayes_labels(test_curves, nodes1)
    bayes_acc = sum(p == t for p, t in zip(bayes_preds, test_labels)) / len(test_labels)
    print(f"plug-in bayes: test accuracy {bayes_acc:.3f}")
    assert bayes_acc > 0.6, f"bayes accuracy too low: {bayes_acc}"
    assert all(math.isfinite(fp.model1_log_rn(c, nodes1)) for c in test_curves[:5])

    # CSV round trip
    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "sample.csv")
        fp.save_csv(path, nodes1, train_curves, train_labels)
        nodes_back, curves_back, labels_back = fp.load_csv(path)
        assert nodes_back == nodes1
        assert curves_back == train_curves
        assert labels_back == train_labels

    # tiny benchmark end to end
    rows = fp.run_benchmark(2, runs=2, train=15, test=10, nodes=21, seed=3,
                            methods=["knn-sup", "hmode"])
    for name, stats in rows:
        assert len(stats) == 7
        assert 0.0 <= stats[3] <= 1.0
        print(f"bench {name}: mean rate {stats[3]:.3f}")

    print("smoke test passed")


if __name__ == "__main__":
    main()
