"""Experiment configuration: TOML file -> validated, immutable dataclasses.

Example::

    seed = 42
    out = "results/report.csv"

    [dataset]
    path = "data/tweets.csv"      # relative to this file; "builtin:toy" for the bundled set
    language = "english"
    split = 0.8

    [reduction]
    pca_k = 2                     # or "none"
    haar_levels = 0

    [classifier]
    method = "qkernel_svm"        # classical_svm | qkernel_svm | vqc

    [feature_map]
    reps = 2
    entanglement = "linear"
    scale_range = [0.0, 6.283185307179586]

    [sweep]
    methods = ["classical_svm", "qkernel_svm", "vqc"]
    pca_k = [2]
    haar_levels = [0, 1, 2, 3, 4]
"""
from __future__ import annotations

import dataclasses
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..errors import ConfigError
from ..featmap import ENTANGLEMENTS, FeatureMapConfig

METHODS = ("classical_svm", "qkernel_svm", "vqc")
QUANTUM_METHODS = ("qkernel_svm", "vqc")
LANGUAGES = ("english", "bengali")
MAX_QUBITS = 12
BUILTIN_TOY = "builtin:toy"


@dataclass(frozen=True)
class DatasetConfig:
    path: str = BUILTIN_TOY
    format: str = "csv"
    language: str = "english"
    stopwords: Optional[str] = None
    split: float = 0.8

    def validate(self):
        if self.format != "csv":
            raise ConfigError(f"dataset.format must be 'csv', got {self.format!r}")
        if self.language not in LANGUAGES:
            raise ConfigError(f"dataset.language must be one of {LANGUAGES}, got {self.language!r}")
        if not 0.0 < self.split < 1.0:
            raise ConfigError(f"dataset.split must lie in (0, 1), got {self.split}")


@dataclass(frozen=True)
class FeatureMapSettings:
    reps: int = 2
    entanglement: str = "linear"
    scale_range: tuple = (0.0, 2.0 * math.pi)

    def validate(self):
        if self.reps < 1:
            raise ConfigError(f"feature_map.reps must be >= 1, got {self.reps}")
        if self.entanglement not in ENTANGLEMENTS:
            raise ConfigError(f"feature_map.entanglement must be one of {ENTANGLEMENTS}")
        lo, hi = self.scale_range
        if not hi > lo:
            raise ConfigError("feature_map.scale_range must be [low, high] with high > low")

    def for_qubits(self, n_qubits) -> FeatureMapConfig:
        lo, hi = self.scale_range
        return FeatureMapConfig(n_qubits, self.reps, self.entanglement, float(lo), float(hi))


@dataclass(frozen=True)
class SvmSettings:
    C: float = 1.0
    tol: float = 1e-3
    max_passes: int = 100

    def validate(self):
        if self.C <= 0 or self.tol <= 0 or self.max_passes < 1:
            raise ConfigError("svm: C and tol must be positive and max_passes >= 1")


@dataclass(frozen=True)
class VqcSettings:
    layers: int = 3
    iterations: int = 100
    learning_rate: float = 0.05
    threshold: float = 0.0

    def validate(self):
        if self.layers < 0 or self.iterations < 0 or self.learning_rate <= 0:
            raise ConfigError("vqc: layers and iterations must be >= 0, learning_rate > 0")


@dataclass(frozen=True)
class SweepSettings:
    methods: tuple = METHODS
    pca_k: tuple = (2,)
    haar_levels: tuple = (0, 1, 2, 3, 4)


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: DatasetConfig = field(default_factory=DatasetConfig)
    seed: int = 42
    pca_k: Optional[int] = 2
    haar_levels: int = 0
    method: str = "classical_svm"
    feature_map: FeatureMapSettings = field(default_factory=FeatureMapSettings)
    svm: SvmSettings = field(default_factory=SvmSettings)
    vqc: VqcSettings = field(default_factory=VqcSettings)
    shots: Optional[int] = None
    sweep: SweepSettings = field(default_factory=SweepSettings)
    out: Optional[str] = None
    base_dir: str = "."

    def __post_init__(self):
        self.dataset.validate()
        self.feature_map.validate()
        self.svm.validate()
        self.vqc.validate()
        if self.method not in METHODS:
            raise ConfigError(f"classifier.method must be one of {METHODS}, got {self.method!r}")
        if self.pca_k is not None and self.pca_k < 1:
            raise ConfigError(f"reduction.pca_k must be >= 1 or 'none', got {self.pca_k}")
        if not 0 <= self.haar_levels <= 5:
            raise ConfigError(f"reduction.haar_levels must be in 0..5, got {self.haar_levels}")
        if self.haar_levels > 0 and self.pca_k is None:
            raise ConfigError("Haar compression runs after PCA: set reduction.pca_k when haar_levels > 0")
        if self.method in QUANTUM_METHODS:
            if self.pca_k is None:
                raise ConfigError(f"{self.method} needs reduction.pca_k (one qubit per feature)")
            if self.pca_k > MAX_QUBITS:
                raise ConfigError(f"{self.method} supports at most {MAX_QUBITS} qubits, pca_k={self.pca_k}")
        if self.shots is not None and self.shots < 1:
            raise ConfigError(f"shots must be >= 1 when set, got {self.shots}")

    def dataset_path(self) -> str:
        p = self.dataset.path
        if p == BUILTIN_TOY or Path(p).is_absolute():
            return p
        return str(Path(self.base_dir) / p)

    def feature_map_config(self) -> FeatureMapConfig:
        return self.feature_map.for_qubits(self.pca_k)

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def variants(self):
        """Sweep configs in a fixed order: pca_k, then Haar level, then method."""
        for k in self.sweep.pca_k:
            for level in self.sweep.haar_levels:
                for method in self.sweep.methods:
                    yield self.replace(pca_k=k, haar_levels=level, method=method)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d.pop("base_dir")
        d["feature_map"]["scale_range"] = list(d["feature_map"]["scale_range"])
        for key in ("methods", "pca_k", "haar_levels"):
            d["sweep"][key] = list(d["sweep"][key])
        return d


_TOP_KEYS = {"seed", "out", "shots", "dataset", "reduction", "classifier", "feature_map", "svm", "vqc", "sweep"}


def _section(raw, name, allowed):
    sec = raw.get(name, {})
    if not isinstance(sec, dict):
        raise ConfigError(f"[{name}] must be a table")
    unknown = set(sec) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown keys in [{name}]: {sorted(unknown)}")
    return sec


def _pca_value(v, where):
    if v is None or (isinstance(v, str) and v.lower() == "none"):
        return None
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{where} must be an integer or 'none', got {v!r}")
    return v


def _typed(sec, key, kind, default, where):
    if key not in sec:
        return default
    v = sec[key]
    if kind is float and isinstance(v, int) and not isinstance(v, bool):
        v = float(v)
    if not isinstance(v, kind) or (isinstance(v, bool) and kind is not bool):
        raise ConfigError(f"{where}.{key} must be {kind.__name__}, got {v!r}")
    return v


def config_from_dict(raw: dict, base_dir=".") -> ExperimentConfig:
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    d = DatasetConfig()
    ds = _section(raw, "dataset", {f.name for f in dataclasses.fields(DatasetConfig)})
    dataset = DatasetConfig(
        path=_typed(ds, "path", str, d.path, "dataset"),
        format=_typed(ds, "format", str, d.format, "dataset"),
        language=_typed(ds, "language", str, d.language, "dataset"),
        stopwords=_typed(ds, "stopwords", str, None, "dataset") or None,
        split=_typed(ds, "split", float, d.split, "dataset"),
    )
    red = _section(raw, "reduction", {"pca_k", "haar_levels"})
    cls = _section(raw, "classifier", {"method"})
    fm_raw = _section(raw, "feature_map", {"reps", "entanglement", "scale_range"})
    f = FeatureMapSettings()
    scale = fm_raw.get("scale_range", f.scale_range)
    if not (isinstance(scale, (list, tuple)) and len(scale) == 2):
        raise ConfigError("feature_map.scale_range must be a two-element list")
    fmap = FeatureMapSettings(
        reps=_typed(fm_raw, "reps", int, f.reps, "feature_map"),
        entanglement=_typed(fm_raw, "entanglement", str, f.entanglement, "feature_map"),
        scale_range=(float(scale[0]), float(scale[1])),
    )
    s_raw = _section(raw, "svm", {"C", "tol", "max_passes"})
    s = SvmSettings()
    svm = SvmSettings(
        C=_typed(s_raw, "C", float, s.C, "svm"),
        tol=_typed(s_raw, "tol", float, s.tol, "svm"),
        max_passes=_typed(s_raw, "max_passes", int, s.max_passes, "svm"),
    )
    v_raw = _section(raw, "vqc", {"layers", "iterations", "learning_rate", "threshold"})
    v = VqcSettings()
    vqc = VqcSettings(
        layers=_typed(v_raw, "layers", int, v.layers, "vqc"),
        iterations=_typed(v_raw, "iterations", int, v.iterations, "vqc"),
        learning_rate=_typed(v_raw, "learning_rate", float, v.learning_rate, "vqc"),
        threshold=_typed(v_raw, "threshold", float, v.threshold, "vqc"),
    )
    sw_raw = _section(raw, "sweep", {"methods", "pca_k", "haar_levels"})
    sw = SweepSettings()
    sweep = SweepSettings(
        methods=tuple(sw_raw.get("methods", sw.methods)),
        pca_k=tuple(_pca_value(k, "sweep.pca_k") for k in sw_raw.get("pca_k", sw.pca_k)),
        haar_levels=tuple(int(l) for l in sw_raw.get("haar_levels", sw.haar_levels)),
    )
    for m in sweep.methods:
        if m not in METHODS:
            raise ConfigError(f"sweep.methods: unknown method {m!r}")
    shots = raw.get("shots")
    if shots == 0:
        shots = None
    return ExperimentConfig(
        dataset=dataset,
        seed=_typed(raw, "seed", int, 42, "config"),
        pca_k=_pca_value(red.get("pca_k", 2), "reduction.pca_k"),
        haar_levels=_typed(red, "haar_levels", int, 0, "reduction"),
        method=_typed(cls, "method", str, "classical_svm", "classifier"),
        feature_map=fmap,
        svm=svm,
        vqc=vqc,
        shots=shots,
        sweep=sweep,
        out=_typed(raw, "out", str, None, "config"),
        base_dir=str(base_dir),
    )


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = tomllib.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return config_from_dict(raw, base_dir=path.parent)
