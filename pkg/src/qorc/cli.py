"""Command-line entry point: ``qorc <subcommand> [options]``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .bundle import load_bundle, save_bundle
from .io import (
    export_report,
    format_table,
    parse_config_file,
    read_surfaces_csv,
    write_json,
    write_surfaces_csv,
)
from .pipeline import (
    VARIANTS,
    PipelineConfig,
    StageError,
    audit_leakage,
    bench_latency,
    compare_variants,
    evaluate,
    run_train,
)
from .synthetic import generate_synthetic

log = logging.getLogger("qorc")


def _config(args) -> PipelineConfig:
    values = parse_config_file(args.config) if args.config else {}
    if args.seed is not None:
        values["seed"] = args.seed
    if getattr(args, "variant", None) and args.variant != "all":
        values["variant"] = args.variant
    return PipelineConfig.from_mapping(values)


def _panel(args, config: PipelineConfig):
    if args.data:
        return read_surfaces_csv(args.data)
    log.info("no --data given; generating %d synthetic days", config.synthetic_days)
    return generate_synthetic(config.synthetic_days, config.seed)


def cmd_generate_data(args) -> int:
    config = _config(args)
    days = args.days or config.synthetic_days
    panel = generate_synthetic(days, config.seed)
    path = Path(args.data) if args.data else Path(args.out) / "surfaces.csv"
    write_surfaces_csv(panel, path)
    print(f"wrote {len(panel)} surfaces to {path}")
    return 0


def cmd_train(args) -> int:
    config = _config(args)
    panel = _panel(args, config)
    out = Path(args.out)
    if args.variant == "all":
        rows = compare_variants(panel, config)
        write_json({"variants": rows}, out / "comparison.json")
        text = format_table(rows)
        (out / "comparison.txt").write_text(text)
        print(text, end="")
        return 0
    result = run_train(config, panel)
    bundle = Path(args.bundle) if args.bundle else out / "bundle"
    save_bundle(result.model, config, bundle)
    export_report(result.report, out)
    write_json(result.timings, out / "timings.json")
    print((out / "report.txt").read_text(), end="")
    print(f"bundle written to {bundle}")
    return 0


def _load(args):
    bundle = Path(args.bundle) if args.bundle else Path(args.out) / "bundle"
    model, config = load_bundle(bundle)
    return model, config


def cmd_predict(args) -> int:
    model, config = _load(args)
    panel = _panel(args, config)
    preds = model.predict(panel.values)
    dates = panel.dates[model.window:] + ["next"]
    out = Path(args.out) / "predictions.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    header = "target_date," + ",".join(f"c{j}" for j in range(preds.shape[1]))
    with out.open("w") as fh:
        fh.write(header + "\n")
        for date, row in zip(dates, preds):
            fh.write(date + "," + ",".join(repr(float(v)) for v in row) + "\n")
    print(f"wrote {len(preds)} forecasts to {out}")
    return 0


def cmd_evaluate(args) -> int:
    model, config = _load(args)
    panel = _panel(args, config)
    report = evaluate(model, panel, config)
    export_report(report, args.out)
    print((Path(args.out) / "report.txt").read_text(), end="")
    return 0


def cmd_bench_latency(args) -> int:
    model, config = _load(args)
    panel = _panel(args, config)
    report = bench_latency(model, panel, n_samples=args.samples)
    write_json(report, Path(args.out) / "latency.json")
    print(f"readout-only: {report['readout_ms']:.4f} ms/sample "
          f"({report['n_readout_features']} features)")
    for label, ms in report["features_ms"].items():
        print(f"feature extraction {label}: {ms:.3f} ms/sample")
    print(f"ridge fit: {report['ridge_fit_seconds']:.3f} s")
    return 0


def cmd_audit_leakage(args) -> int:
    config = _config(args)
    panel = _panel(args, config)
    result = audit_leakage(panel, config)
    write_json(result, Path(args.out) / "leakage_audit.json")
    for name, ok in result["checks"].items():
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
    return 0 if result["passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qorc", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, bundle=False):
        p.add_argument("--seed", type=int, default=None, help="master seed (default 42)")
        p.add_argument("--config", help="key = value config file")
        p.add_argument("--data", help="surface CSV")
        p.add_argument("--out", default="out", help="output directory")
        if bundle:
            p.add_argument("--bundle", help="bundle directory (default <out>/bundle)")
        return p

    p = common(sub.add_parser("generate-data", help="write a synthetic surface CSV"))
    p.add_argument("--days", type=int, default=None)
    p.set_defaults(func=cmd_generate_data)

    p = common(sub.add_parser("train", help="fit a variant and write bundle + report"), True)
    p.add_argument("--variant", choices=[*VARIANTS, "all"], default="qorc")
    p.set_defaults(func=cmd_train)

    p = common(sub.add_parser("predict", help="next-day forecasts from a bundle"), True)
    p.set_defaults(func=cmd_predict)

    p = common(sub.add_parser("evaluate", help="validation/test metrics from a bundle"), True)
    p.set_defaults(func=cmd_evaluate)

    p = common(sub.add_parser("bench-latency", help="inference latency of a bundle"), True)
    p.add_argument("--samples", type=int, default=1000)
    p.set_defaults(func=cmd_bench_latency)

    p = common(sub.add_parser("audit-leakage", help="check fitted state ignores held-out days"))
    p.add_argument("--variant", choices=list(VARIANTS), default="qorc")
    p.set_defaults(func=cmd_audit_leakage)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: [{args.command}] {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
