"""Compare the numba and numpy kernel backends.

    python benchmarks/bench_backends.py [--repeat 3]

Each workload is run once to warm up (numba compiles on first call) and then
timed ``--repeat`` times; the best time is reported.
"""
import argparse
import math
import time

import numpy as np

from qsentiment import kernels
from qsentiment.featmap import FeatureMapConfig, feature_states
from qsentiment.qml import quantum_kernel_matrix, vqc_train
from qsentiment.svm import svm_train_linear


def _workloads():
    rng = np.random.default_rng(0)
    x4 = rng.uniform(0, 2 * math.pi, size=(400, 4))
    x6 = rng.uniform(0, 2 * math.pi, size=(150, 6))
    pts = np.vstack([rng.normal(-1, 1.5, size=(750, 2)), rng.normal(1, 1.5, size=(750, 2))])
    labels = np.repeat([0, 1], 750)
    x2 = rng.uniform(0, 2 * math.pi, size=(40, 2))
    y2 = (np.sin(x2[:, 0]) * np.cos(x2[:, 1]) > 0).astype(int)
    return {
        "feature states (400 x 4 qubits)": lambda: feature_states(x4, FeatureMapConfig(4)),
        "kernel Gram (150 x 6 qubits)": lambda: quantum_kernel_matrix(x6, cfg=FeatureMapConfig(6)),
        "SMO linear SVM (1500 points)": lambda: svm_train_linear(pts, labels),
        "VQC training (40 points, 50 steps)": lambda: vqc_train(x2, y2, FeatureMapConfig(2), iterations=50),
    }


def _best(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    backends = kernels.available_backends()
    previous = kernels.BACKEND
    rows = []
    try:
        for name, fn in _workloads().items():
            timings = {}
            for backend in backends:
                kernels.use_backend(backend)
                timings[backend] = _best(fn, args.repeat)
            rows.append((name, timings))
    finally:
        kernels.use_backend(previous)
    header = f"{'workload':38s}" + "".join(f"{b:>12s}" for b in backends)
    if "numba" in backends:
        header += f"{'speedup':>10s}"
    print(header)
    for name, t in rows:
        line = f"{name:38s}" + "".join(f"{t[b]:11.4f}s" for b in backends)
        if "numba" in t:
            line += f"{t['numpy'] / t['numba']:9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
