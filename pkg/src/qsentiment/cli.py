"""Command-line interface.

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 non-convergence.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from . import kernels, textprep
from .errors import ConfigError, ConvergenceError, DatasetError, QSentimentError, StageError, StructureError
from .pipeline import config as cfgmod
from .pipeline.experiment import FittedPipeline, fit_pipeline, prepare, run_experiment, run_sweep
from .pipeline.metrics import MetricsReport, compute_metrics
from .pipeline.report import emit_report, load_reports

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_CONVERGENCE = 0, 1, 2, 3

log = logging.getLogger("qsentiment")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _load(args) -> cfgmod.ExperimentConfig:
    cfg = cfgmod.load_config(args.config) if args.config else cfgmod.ExperimentConfig()
    changes = {}
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    if getattr(args, "out", None) is not None:
        changes["out"] = args.out
    return cfg.replace(**changes) if changes else cfg


def _out_path(cfg, default):
    return Path(cfg.out) if cfg.out else Path(default)


def cmd_preprocess(args):
    cfg = _load(args)
    prepared = prepare(cfg)
    vocab = textprep.build_vocabulary(prepared.train_tokens)
    out = _out_path(cfg, "vectors.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["split", "label", *vocab.terms])
        for split, toks, ys in (("train", prepared.train_tokens, prepared.y_train),
                                ("test", prepared.test_tokens, prepared.y_test)):
            for doc, y in zip(toks, ys):
                w.writerow([split, int(y), *textprep.vectorize(doc, vocab).tolist()])
    vocab_path = out.with_name(out.stem + ".vocab.csv")
    vocab.save(vocab_path)
    print(f"wrote {len(prepared.train_tokens)}+{len(prepared.test_tokens)} vectors over "
          f"{len(vocab)} terms to {out} (vocabulary: {vocab_path})")
    return EXIT_OK


def cmd_train(args):
    cfg = _load(args)
    report, fitted = run_experiment(cfg, return_pipeline=True)
    out = _out_path(cfg, "model.json")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(fitted.to_dict()) + "\n", encoding="utf-8")
    if args.metrics:
        emit_report([report], "json", args.metrics)
    print(f"{cfg.method}: train_acc={report.train.accuracy:.4f} test_acc={report.test.accuracy:.4f} "
          f"train_time={report.train_time_s:.3f}s -> {out}")
    if not report.converged:
        raise ConvergenceError(f"SVM did not converge within {cfg.svm.max_passes} sweeps (model still written)")
    return EXIT_OK


def cmd_evaluate(args):
    cfg = _load(args)
    try:
        bundle = json.loads(Path(args.model).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read model bundle {args.model}: {exc}") from exc
    fitted = FittedPipeline.from_dict(bundle)
    prepared = prepare(cfg)
    train_pred = fitted.predict(fitted.features(prepared.train_tokens))
    test_pred = fitted.predict(fitted.features(prepared.test_tokens))
    report = MetricsReport(
        method=fitted.method,
        pca_k=fitted.pca_k,
        haar_levels=cfg.haar_levels,
        train=compute_metrics(prepared.y_train, train_pred),
        test=compute_metrics(prepared.y_test, test_pred),
        train_time_s=0.0,
        n_train=len(prepared.y_train),
        n_test=len(prepared.y_test),
        converged=fitted.converged,
        discarded=prepared.discarded,
        config=cfg.to_dict(),
    )
    out = _out_path(cfg, "metrics.json")
    emit_report([report], args.format, out)
    print(f"{fitted.method}: train_acc={report.train.accuracy:.4f} test_acc={report.test.accuracy:.4f} -> {out}")
    return EXIT_OK


def cmd_sweep(args):
    cfg = _load(args)
    reports = run_sweep(cfg, jobs=args.jobs)
    out = _out_path(cfg, f"sweep.{args.format}")
    emit_report(reports, args.format, out)
    if args.json:
        emit_report(reports, "json", args.json)
    for r in reports:
        print(f"{r.method:14s} pca_k={r.pca_k} haar={r.haar_levels} train={r.train.accuracy:.4f} "
              f"test={r.test.accuracy:.4f} time={r.train_time_s:.3f}s")
    print(f"wrote {len(reports)} rows to {out}")
    if not all(r.converged for r in reports):
        raise ConvergenceError("at least one SVM did not converge (report still written)")
    return EXIT_OK


def cmd_report(args):
    reports = []
    for path in args.inputs:
        try:
            reports.extend(load_reports(path))
        except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
            raise DatasetError(f"cannot read report {path}: {exc}") from exc
    emit_report(reports, args.format, args.out)
    print(f"wrote {len(reports)} rows to {args.out}")
    return EXIT_OK


def build_parser():
    p = _Parser(prog="qsentiment", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("--backend", choices=kernels.available_backends(),
                   help=f"kernel backend (default from ${kernels.ENV_FLAG}: {kernels.BACKEND})")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--config", "-c", help="experiment TOML file (default: built-in toy config)")
        sp.add_argument("--seed", type=int, help="override the config seed")
        sp.add_argument("--out", "-o", help="override the output path")

    sp = sub.add_parser("preprocess", help="clean, tokenise and emit count vectors plus the vocabulary")
    common(sp)
    sp.set_defaults(func=cmd_preprocess)

    sp = sub.add_parser("train", help="fit one configured experiment and write a model bundle")
    common(sp)
    sp.add_argument("--metrics", help="also write the metrics report as JSON")
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("evaluate", help="score a model bundle on the configured train/test split")
    common(sp)
    sp.add_argument("--model", required=True)
    sp.add_argument("--format", choices=("csv", "json"), default="json")
    sp.set_defaults(func=cmd_evaluate)

    sp = sub.add_parser("sweep", help="run the method x reduction matrix")
    common(sp)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--json", help="also write the full reports as JSON")
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("report", help="merge JSON reports into a CSV or JSON table")
    sp.add_argument("inputs", nargs="+")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--out", "-o", required=True)
    sp.set_defaults(func=cmd_report)
    return p


def exit_code_for(exc) -> int:
    if isinstance(exc, StageError):
        exc = exc.cause
    if isinstance(exc, ConvergenceError):
        return EXIT_CONVERGENCE
    if isinstance(exc, (DatasetError, StructureError)):
        return EXIT_DATA
    return EXIT_CONFIG


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.backend:
        kernels.use_backend(args.backend)
    try:
        return args.func(args)
    except (QSentimentError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(main())
