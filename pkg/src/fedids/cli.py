"""Command-line entry point.

Subcommands:
  run       execute the configured approaches and write all artifacts
  validate  check a config file, printing every problem found
  synth     generate a synthetic dataset (CSV + schema + manifest)
  report    re-render pairs/overlap/summary from an existing run directory

Exit codes: 0 success, 1 configuration error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import os
import sys

from .experiment import ConfigError, rerender_reports, run_all, validate_config
from .io import save_schema, write_dataset_csv, write_manifest
from .seeding import derive_seed
from .synthetic import generate_synthetic, load_synthetic_spec


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fedids",
        description="Federated intrusion-detection simulator with transferability evaluation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the configured experiment")
    run.add_argument("config", help="experiment config file (YAML)")
    run.add_argument("--approaches", help="comma-separated subset of the configured approaches")
    run.add_argument("--seed", type=int, help="override the master seed")
    run.add_argument("--out", help="override the output directory")

    val = sub.add_parser("validate", help="validate a config file")
    val.add_argument("config", help="experiment config file (YAML)")

    synth = sub.add_parser("synth", help="generate a synthetic dataset")
    synth.add_argument("spec", help="synthetic dataset spec (YAML)")
    synth.add_argument("--out", required=True, help="output directory")
    synth.add_argument("--seed", type=int, default=0)

    report = sub.add_parser("report", help="re-render reports from run artifacts")
    report.add_argument("out_dir", help="run output directory containing matrix.csv files")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            try:
                cfg = validate_config(args.config)
            except FileNotFoundError as exc:
                print(f"error: {exc}", file=sys.stderr)
                return 1
            print("config OK; resolved values:")
            import yaml

            print(yaml.safe_dump(cfg.snapshot(), sort_keys=True), end="")
            return 0

        if args.command == "run":
            try:
                with open(args.config, "r", encoding="utf-8") as fh:
                    import yaml

                    raw = yaml.safe_load(fh)
            except FileNotFoundError as exc:
                print(f"error: {exc}", file=sys.stderr)
                return 1
            from dataclasses import replace as dc_replace

            from .experiment import config_from_dict

            if args.seed is not None:
                # override before validation so derived child seeds follow
                raw["seed"] = args.seed
            cfg = config_from_dict(raw, base_dir=os.path.dirname(os.path.abspath(args.config)))
            if args.out is not None:
                cfg = dc_replace(cfg, output_dir=args.out)
            if args.approaches:
                wanted = tuple(a.strip() for a in args.approaches.split(",") if a.strip())
                unknown = [a for a in wanted if a not in cfg.approaches]
                if unknown:
                    print(
                        f"error: --approaches {unknown} not in configured {list(cfg.approaches)}",
                        file=sys.stderr,
                    )
                    return 1
                cfg = dc_replace(cfg, approaches=wanted)
            base_dir = os.path.dirname(os.path.abspath(args.config))
            report = run_all(cfg, base_dir=base_dir)
            print("\n".join(report.summary_lines()))
            print(f"artifacts written to {cfg.output_dir}")
            return 0

        if args.command == "synth":
            spec = load_synthetic_spec(args.spec)
            ds = generate_synthetic(spec, seed=derive_seed(args.seed, "synthetic"))
            os.makedirs(args.out, exist_ok=True)
            schema = write_dataset_csv(ds, os.path.join(args.out, "dataset.csv"))
            save_schema(schema, os.path.join(args.out, "schema.yaml"))
            write_manifest(ds, os.path.join(args.out, "manifest.json"))
            print(f"wrote {len(ds)} records to {args.out}/dataset.csv")
            return 0

        if args.command == "report":
            report = rerender_reports(args.out_dir)
            print("\n".join(report.summary_lines()))
            return 0

        raise AssertionError(f"unhandled command {args.command}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failure: stage-tagged message, code 2
        print(f"runtime failure ({args.command}): {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
