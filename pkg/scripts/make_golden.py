"""Regenerate tests/golden/toy_report.csv from the bundled toy set.

Training time is taken from a fake clock that advances 0.25 s per reading,
so the file is stable across machines.
"""
import itertools
from pathlib import Path

from qsentiment.pipeline import ExperimentConfig, render_report, run_sweep
from qsentiment.pipeline.config import SweepSettings

GOLDEN = Path(__file__).resolve().parents[1] / "tests" / "golden" / "toy_report.csv"


def golden_config():
    return ExperimentConfig(pca_k=2, sweep=SweepSettings(methods=("classical_svm", "qkernel_svm", "vqc"),
                                                          pca_k=(2,), haar_levels=(0,)))


def fake_clock():
    ticks = itertools.count()
    return lambda: 0.25 * next(ticks)


def render():
    return render_report(run_sweep(golden_config(), clock=fake_clock()), "csv")


if __name__ == "__main__":
    GOLDEN.write_text(render(), encoding="utf-8", newline="")
    print(f"wrote {GOLDEN}")
