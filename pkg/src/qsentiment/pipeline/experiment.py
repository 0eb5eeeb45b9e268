"""End-to-end experiment: text -> counts -> PCA -> scaling -> Haar -> classifier -> metrics.

Every fitted statistic (vocabulary, PCA, scaler) is computed on the training
split only; :class:`FitLog` records which split each fit saw so tests can
assert it.  Training time covers classifier fitting only, including the
Gram-matrix evaluation for the quantum-kernel SVM.
"""
from __future__ import annotations

import contextlib
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .. import dimred, qml, svm, textprep
from ..errors import ConfigError, QSentimentError, StageError
from ..featmap import FeatureMapConfig, FeatureScaler
from .config import ExperimentConfig
from .data import load_dataset, train_test_split
from .metrics import MetricsReport, compute_metrics

log = logging.getLogger(__name__)


@dataclass
class FitLog:
    entries: list = field(default_factory=list)

    def record(self, stage, split):
        self.entries.append((stage, split))


@dataclass
class Prepared:
    """Tokenised, labelled and split corpus; shared by every run of a sweep."""

    train_tokens: list
    test_tokens: list
    y_train: np.ndarray
    y_test: np.ndarray
    label_map: dict
    discarded: dict


@contextlib.contextmanager
def stage(name, cfg=None):
    try:
        yield
    except StageError:
        raise
    except (QSentimentError, ValueError, IndexError, np.linalg.LinAlgError) as exc:
        raise StageError(name, exc, cfg.to_dict() if cfg is not None else None) from exc


def prepare(cfg: ExperimentConfig) -> Prepared:
    with stage("load", cfg):
        docs = load_dataset(cfg.dataset_path(), cfg.dataset.format)
    with stage("preprocess", cfg):
        profile = textprep.language_profile(cfg.dataset.language, cfg.dataset.stopwords)
        tokens, labels = [], []
        discarded = {"empty_after_cleaning": 0, "empty_after_stopwords": 0}
        for doc in docs:
            text = textprep.clean_text(doc.text, profile.rules)
            if not text:
                discarded["empty_after_cleaning"] += 1
                continue
            toks = profile.tokens(text)
            if not toks:
                discarded["empty_after_stopwords"] += 1
                continue
            tokens.append(toks)
            labels.append(doc.label)
        if any(discarded.values()):
            log.warning("dropped %d empty documents (%s)", sum(discarded.values()), discarded)
        y, label_map = textprep.encode_labels(labels)
    with stage("split", cfg):
        tr, te = train_test_split(y, cfg.dataset.split, cfg.seed)
    return Prepared([tokens[i] for i in tr], [tokens[i] for i in te], y[tr], y[te], label_map, discarded)


class FittedPipeline:
    """Fitted feature transforms plus the trained classifier."""

    def __init__(self, method, label_map, vocab, pca, pca_k, scaler, fmap, model, fit_features=None,
                 shots=None, seed=0):
        self.method = method
        self.label_map = label_map
        self.vocab = vocab
        self.pca = pca
        self.pca_k = pca_k
        self.scaler = scaler
        self.fmap = fmap
        self.model = model
        self.fit_features = fit_features
        self.shots = shots
        self.seed = seed
        self.train_gram = None  # training Gram matrix of a freshly fitted kernel model; not serialised

    def features(self, tokens):
        counts = textprep.vectorize_corpus(tokens, self.vocab).astype(np.float64)
        if self.pca is not None:
            counts = dimred.pca_transform(self.pca, counts, self.pca_k)
        return self.scaler.transform(counts)

    def predict(self, X):
        if self.method == "classical_svm":
            return svm.svm_predict(self.model, X=X)[0]
        if self.method == "qkernel_svm":
            k = qml.quantum_kernel_matrix(X, self.fit_features, self.fmap, shots=self.shots, seed=self.seed + 1)
            return svm.svm_predict(self.model, k_rows=k)[0]
        if self.shots is not None:
            return np.array([int(qml.vqc_forward(x, self.model, self.shots, self.seed + i) >= self.model.threshold)
                             for i, x in enumerate(X)])
        return qml.vqc_predict_batch(X, self.model)

    @property
    def converged(self):
        return getattr(self.model, "converged", True)

    def to_dict(self):
        return {
            "format": "qsentiment-model/1",
            "method": self.method,
            "label_map": self.label_map,
            "vocabulary": list(self.vocab.terms),
            "pca": None if self.pca is None else self.pca.to_dict(),
            "pca_k": self.pca_k,
            "scaler": self.scaler.to_dict(),
            "feature_map": None if self.fmap is None else self.fmap.to_dict(),
            "model": self.model.to_dict(),
            "fit_features": None if self.fit_features is None else self.fit_features.tolist(),
            "shots": self.shots,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d):
        if d.get("format") != "qsentiment-model/1":
            raise ConfigError("not a qsentiment model bundle")
        method = d["method"]
        model = qml.VqcModel.from_dict(d["model"]) if method == "vqc" else svm.SvmModel.from_dict(d["model"])
        return cls(
            method=method,
            label_map=d["label_map"],
            vocab=textprep.Vocabulary(d["vocabulary"]),
            pca=None if d["pca"] is None else dimred.PcaModel.from_dict(d["pca"]),
            pca_k=d["pca_k"],
            scaler=FeatureScaler.from_dict(d["scaler"]),
            fmap=None if d["feature_map"] is None else FeatureMapConfig.from_dict(d["feature_map"]),
            model=model,
            fit_features=None if d["fit_features"] is None else np.asarray(d["fit_features"], dtype=np.float64),
            shots=d.get("shots"),
            seed=d.get("seed", 0),
        )


def _train_classifier(cfg, X, y, fmap):
    if cfg.method == "classical_svm":
        s = cfg.svm
        return svm.svm_train_linear(X, y, C=s.C, tol=s.tol, max_passes=s.max_passes, seed=cfg.seed), None
    if cfg.method == "qkernel_svm":
        s = cfg.svm
        k = qml.quantum_kernel_matrix(X, None, fmap, shots=cfg.shots, seed=cfg.seed)
        return svm.svm_train(k, y, C=s.C, tol=s.tol, max_passes=s.max_passes, seed=cfg.seed), k
    v = cfg.vqc
    model = qml.vqc_train(X, y, fmap, layers=v.layers, iterations=v.iterations, seed=cfg.seed,
                          lr=v.learning_rate, threshold=v.threshold)
    return model, None


def fit_pipeline(cfg: ExperimentConfig, prepared: Prepared, clock: Callable[[], float] = time.perf_counter,
                 fit_log: Optional[FitLog] = None):
    """Fit transforms and classifier; returns ``(pipeline, X_fit, y_fit, train_time_s)``."""
    fit_log = fit_log if fit_log is not None else FitLog()
    with stage("vocabulary", cfg):
        vocab = textprep.build_vocabulary(prepared.train_tokens)
        fit_log.record("vocabulary", "train")
        counts = textprep.vectorize_corpus(prepared.train_tokens, vocab).astype(np.float64)
    pca = None
    with stage("pca", cfg):
        if cfg.pca_k is not None:
            limit = min(counts.shape)
            if cfg.pca_k > limit:
                raise ConfigError(f"pca_k={cfg.pca_k} exceeds the {limit} components available")
            pca = dimred.pca_fit(counts, cfg.pca_k)
            fit_log.record("pca", "train")
            counts = dimred.pca_transform(pca, counts, cfg.pca_k)
    with stage("scale", cfg):
        lo, hi = cfg.feature_map.scale_range
        scaler = FeatureScaler(lo, hi).fit(counts)
        fit_log.record("scaler", "train")
        X = scaler.transform(counts)
    with stage("haar", cfg):
        X_fit, y_fit = dimred.haar_compress_dataset(X, prepared.y_train, cfg.haar_levels)
    fmap = cfg.feature_map_config() if cfg.method != "classical_svm" else None
    with stage("train", cfg):
        t0 = clock()
        model, gram = _train_classifier(cfg, X_fit, y_fit, fmap)
        train_time = clock() - t0
    fitted = FittedPipeline(cfg.method, prepared.label_map, vocab, pca, cfg.pca_k, scaler, fmap, model,
                            X_fit if cfg.method == "qkernel_svm" else None, cfg.shots, cfg.seed)
    fitted.train_gram = gram
    return fitted, X_fit, y_fit, train_time


def run_experiment(cfg: ExperimentConfig, prepared: Optional[Prepared] = None,
                   clock: Callable[[], float] = time.perf_counter, fit_log: Optional[FitLog] = None,
                   return_pipeline=False):
    if prepared is None:
        prepared = prepare(cfg)
    fitted, X_fit, y_fit, train_time = fit_pipeline(cfg, prepared, clock, fit_log)
    with stage("evaluate", cfg):
        if fitted.train_gram is not None and cfg.shots is None:
            train_pred = svm.svm_predict(fitted.model, k_rows=fitted.train_gram)[0]
        else:
            train_pred = fitted.predict(X_fit)
        test_pred = fitted.predict(fitted.features(prepared.test_tokens))
        report = MetricsReport(
            method=cfg.method,
            pca_k=cfg.pca_k,
            haar_levels=cfg.haar_levels,
            train=compute_metrics(y_fit, train_pred),
            test=compute_metrics(prepared.y_test, test_pred),
            train_time_s=float(train_time),
            n_train=int(y_fit.shape[0]),
            n_test=int(prepared.y_test.shape[0]),
            converged=bool(fitted.converged),
            discarded=dict(prepared.discarded),
            config=cfg.to_dict(),
        )
    return (report, fitted) if return_pipeline else report


def _run_variant(args):
    cfg, prepared = args
    return run_experiment(cfg, prepared)


def run_sweep(cfg: ExperimentConfig, jobs=1, clock: Callable[[], float] = time.perf_counter):
    """Run every sweep variant; reports come back in config order whatever the job count."""
    prepared = prepare(cfg)
    variants = list(cfg.variants())
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_variant, [(v, prepared) for v in variants]))
    return [run_experiment(v, prepared, clock) for v in variants]
