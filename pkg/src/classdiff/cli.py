"""Command-line interface: score, matrix, correlate, fit, sample, synth, bench.

Every command writes a JSON report (sections: config, scores, matrices,
correlations, fits, timings) and prints a one-line summary.  Errors exit
nonzero with a single `error[<module>]:` line on stderr: 2 for usage,
3 for data problems, 4 for numeric degeneracy.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    fit_report_points,
    load_accuracy_csv,
    matrix_correlation,
    run_study,
    sample_subsets,
)
from .errors import ClassDiffError, UsageError
from .measures import MEASURES, score_dataset
from .proxy import SyntheticSpec, accuracy_matrix, generate, proxy_accuracy
from .similarity import (
    KINDS,
    matrix_to_csv,
    mean_cosine_fast,
    pair_matrix,
    summarize,
)
from .store import build_cache, load_dataset, save_dataset

_MODULE = "cli"


def _csv_list(text: str, cast):
    try:
        return [cast(part) for part in text.split(",") if part != ""]
    except ValueError as exc:
        raise UsageError(f"bad list value {text!r}: {exc}", _MODULE) from exc


def _build_report(args, **sections) -> dict:
    # `out` is excluded so the report bytes do not depend on where the
    # report itself is written.
    config = {
        k: v for k, v in vars(args).items() if k not in ("func", "out") and v is not None
    }
    config["version"] = __version__
    report = {"config": config}
    if not getattr(args, "no_timestamp", False):
        report["timestamp"] = datetime.now(timezone.utc).isoformat()
    for key in ("scores", "matrices", "correlations", "fits", "timings"):
        if key in sections:
            report[key] = sections[key]
    return report


def _emit(report: dict, args, text: str | None = None) -> None:
    """Write the report (or raw text for CSV output) and print a summary."""
    payload = (
        text
        if text is not None
        else json.dumps(report, indent=2, sort_keys=True) + "\n"
    )
    if args.out:
        Path(args.out).write_text(payload, encoding="utf-8")


def _require_manifest(args):
    if not args.manifest:
        raise UsageError("--manifest is required for this command", _MODULE)
    return load_dataset(args.manifest)


def cmd_score(args) -> int:
    ds = _require_manifest(args)
    score = score_dataset(ds, args.measure, getattr(args, "lambda"), args.permissive)
    report = _build_report(args, scores=[score.to_dict()])
    _emit(report, args)
    print(
        f"{score.measure}(lambda={score.lam:g}) = {score.value:.6g} "
        f"[dataset {ds.dataset_id}, {ds.n_classes} classes]"
    )
    return 0


def cmd_matrix(args) -> int:
    ds = _require_manifest(args)
    labels, sim = pair_matrix(ds, args.kind, args.permissive)
    matrices = {"labels": labels, "similarity": [list(map(float, row)) for row in sim]}
    summary = f"{ds.n_classes}x{ds.n_classes} {args.kind} matrix [dataset {ds.dataset_id}]"
    if args.with_proxy:
        _, acc = accuracy_matrix(
            ds, args.evaluator, seed=args.split_seed,
            train_fraction=args.train_fraction, threads=args.threads,
        )
        r = matrix_correlation(sim, acc)
        matrices["accuracy"] = [list(map(float, row)) for row in acc]
        matrices["matrix_r"] = r
        matrices["matrix_abs_r"] = abs(r)
        summary += f", |r| vs proxy accuracy = {abs(r):.4f}"
    report = _build_report(args, matrices=matrices)
    if args.format == "csv":
        _emit(report, args, text=matrix_to_csv(labels, sim))
    else:
        _emit(report, args)
    print(summary)
    return 0


def cmd_correlate(args) -> int:
    ds = _require_manifest(args)
    measures = _csv_list(args.measures, str) if args.measures else [args.measure]
    lambdas = _csv_list(args.lambdas, float) if args.lambdas else [getattr(args, "lambda")]
    seeds = _csv_list(args.seeds, int)
    n_cl_values = _csv_list(args.ncl, int)
    if not n_cl_values:
        raise UsageError("--ncl must list at least one class count", _MODULE)
    for m in measures:
        if m not in MEASURES:
            raise UsageError(f"unknown measure {m!r}; choose from {MEASURES}", _MODULE)

    if args.accuracy:
        source = load_accuracy_csv(args.accuracy)
        evaluator_id = args.evaluator_id
    else:
        def source(subset_ds, subset_id):
            return proxy_accuracy(
                subset_ds,
                args.evaluator,
                train_fraction=args.train_fraction,
                split_seed=args.split_seed,
            ).accuracy

        evaluator_id = f"proxy-{args.evaluator}"

    result = run_study(
        ds, n_cl_values, seeds, measures, lambdas, source,
        evaluator_id=evaluator_id, pairing=args.pairing,
        permissive=args.permissive, threads=args.threads,
    )
    scores = [
        {
            "subset_id": ss.spec.subset_id,
            "n_cl": ss.spec.n_cl,
            "seed": ss.spec.seed,
            "labels": list(ss.spec.labels),
            "accuracy": ss.accuracy,
            "scores": {f"{m}@{lam:g}": v for (m, lam), v in sorted(ss.scores.items())},
        }
        for ss in result.subsets
    ]
    correlations = [rep.to_dict() for rep in result.reports]
    report = _build_report(args, scores=scores, correlations=correlations)
    _emit(report, args)
    for rep in result.reports:
        print(
            f"{rep.measure}(lambda={rep.lam:g}): |r| = {rep.abs_r:.4f} "
            f"over {rep.n_points} points"
        )
    return 0


def cmd_fit(args) -> int:
    degrees = _csv_list(args.degrees, int)
    if args.study:
        study = json.loads(Path(args.study).read_text(encoding="utf-8"))
        correlations = study.get("correlations", [])
        if not correlations:
            raise UsageError(f"no correlations in study file {args.study}", _MODULE)
        chosen = correlations[0]
        if args.measures:
            wanted = args.measures.split(",")[0]
            match = [c for c in correlations if c["measure"] == wanted]
            if not match:
                raise UsageError(f"measure {wanted!r} not in study file", _MODULE)
            chosen = match[0]
        points = [tuple(p) for p in chosen["points"]]
    elif args.points:
        raw = np.loadtxt(args.points, delimiter=",", ndmin=2)
        points = [(float(x), float(y)) for x, y in raw]
    else:
        raise UsageError("fit needs --study <report.json> or --points <csv>", _MODULE)

    fits = fit_report_points(points, degrees)
    report = _build_report(args, fits=[f.to_dict() for f in fits])
    _emit(report, args)
    for f in fits:
        print(f"degree {f.degree}: mse = {f.mse:.6g}, coefficients = "
              + "[" + ", ".join(f"{c:.6g}" for c in f.coefficients) + "]")
    return 0


def cmd_sample(args) -> int:
    if args.manifest:
        labels = load_dataset(args.manifest).labels()
    elif args.labels:
        labels = _csv_list(args.labels, str)
    else:
        raise UsageError("sample needs --manifest or --labels", _MODULE)
    seeds = _csv_list(args.seeds, int)
    n_cl_values = _csv_list(args.ncl, int)
    specs = []
    for n_cl in n_cl_values:
        specs.extend(sample_subsets(labels, n_cl, seeds))
    scores = [
        {"subset_id": s.subset_id, "n_cl": s.n_cl, "seed": s.seed, "labels": list(s.labels)}
        for s in specs
    ]
    report = _build_report(args, scores=scores)
    _emit(report, args)
    for s in specs:
        print(f"{s.subset_id}: {','.join(s.labels)}")
    return 0


def cmd_synth(args) -> int:
    spec = SyntheticSpec(
        n_classes=args.classes,
        instances_per_class=args.per_class,
        dim=args.dim,
        center_spread=args.spread,
        noise_sigma=args.sigma,
        seed=args.seed,
    )
    ds = generate(spec)
    if not args.out_dir:
        raise UsageError("synth needs --out-dir", _MODULE)
    manifest_path = save_dataset(ds, args.out_dir, fmt=args.file_format)
    print(f"wrote {ds.n_classes} classes x {args.per_class} x dim {args.dim} "
          f"-> {manifest_path}")
    return 0


def _timeit(fn, repeats: int = 3) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cmd_bench(args) -> int:
    ds = _require_manifest(args)
    cache = {}

    def build():
        cache["value"] = build_cache(ds)

    t_cache = _timeit(build)
    t_fast = _timeit(lambda: mean_cosine_fast(cache["value"], args.permissive))
    t_brute = _timeit(lambda: summarize(ds, "cosine", args.permissive))
    n_pairs = ds.n_classes * (ds.n_classes - 1) // 2 + ds.n_classes
    timings = {
        "cache_build_s": t_cache,
        "fast_path_s": t_fast,
        "fast_total_s": t_cache + t_fast,
        "brute_force_s": t_brute,
        "per_pair_fast_s": t_fast / n_pairs,
        "per_pair_brute_s": t_brute / n_pairs,
        "n_classes": ds.n_classes,
        "n_instances": sum(b.n_instances for b in ds.classes),
        "dim": ds.dim,
    }
    report = _build_report(args, timings=timings)
    _emit(report, args)
    print(
        f"cache {t_cache * 1e3:.2f} ms, fast {t_fast * 1e3:.2f} ms, "
        f"brute {t_brute * 1e3:.2f} ms "
        f"({timings['n_instances']} instances, dim {timings['dim']})"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="classdiff",
        description="Classification-difficulty scores for labeled embedding sets",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--manifest", help="dataset manifest JSON")
        p.add_argument("--out", help="report output path")
        p.add_argument("--format", choices=["json", "csv"], default="json")
        p.add_argument("--kind", choices=list(KINDS), default="cosine")
        p.add_argument("--measure", choices=list(MEASURES), default="soft_sim")
        p.add_argument("--lambda", dest="lambda", type=float, default=0.5)
        p.add_argument("--seeds", default="0,1,2,3,4", help="comma-separated seeds")
        p.add_argument("--ncl", default="", help="comma-separated class counts")
        p.add_argument("--permissive", action="store_true",
                       help="drop single-instance classes instead of failing")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--no-timestamp", action="store_true",
                       help="omit the timestamp from reports (reproducible output)")

    p = sub.add_parser("score", help="difficulty score for one dataset")
    common(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("matrix", help="class-pair similarity matrix")
    common(p)
    p.add_argument("--with-proxy", action="store_true",
                   help="add the proxy accuracy matrix and their correlation")
    p.add_argument("--evaluator", choices=["centroid", "knn"], default="centroid")
    p.add_argument("--train-fraction", type=float, default=0.5)
    p.add_argument("--split-seed", type=int, default=0)
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("correlate", help="difficulty vs accuracy over class subsets")
    common(p)
    p.add_argument("--measures", help="comma-separated measure names")
    p.add_argument("--lambdas", help="comma-separated lambda values")
    p.add_argument("--accuracy", help="accuracy CSV (subset_id,evaluator_id,accuracy)")
    p.add_argument("--evaluator-id", default="import",
                   help="evaluator column to match in the accuracy CSV")
    p.add_argument("--evaluator", choices=["centroid", "knn"], default="centroid")
    p.add_argument("--train-fraction", type=float, default=0.5)
    p.add_argument("--split-seed", type=int, default=0)
    p.add_argument("--pairing", choices=["per_subset", "per_ncl"], default="per_subset")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("fit", help="polynomial fits of difficulty vs accuracy")
    common(p)
    p.add_argument("--study", help="correlate report JSON to take points from")
    p.add_argument("--points", help="CSV of difficulty,accuracy rows")
    p.add_argument("--measures", help="measure to select from the study file")
    p.add_argument("--degrees", default="1,2,3")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("sample", help="seeded class-subset sampling")
    common(p)
    p.add_argument("--labels", help="comma-separated labels (alternative to --manifest)")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("synth", help="generate a synthetic clustered dataset")
    common(p)
    p.add_argument("--classes", type=int, default=4)
    p.add_argument("--per-class", type=int, default=50)
    p.add_argument("--dim", type=int, default=16)
    p.add_argument("--spread", type=float, default=2.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", help="directory for manifest + arrays")
    p.add_argument("--file-format", choices=["npy", "csv"], default="npy")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("bench", help="time the fast path against brute force")
    common(p)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ClassDiffError as exc:
        print(f"error[{exc.module}]: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
