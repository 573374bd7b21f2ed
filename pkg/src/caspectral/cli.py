"""``caspectral`` command line: run one experiment preset to a CSV file."""

import argparse
import sys

from .experiments import EXPERIMENTS, ConfigError, config_keys, load_config, parse_config, run, summarize, write_csv

EXIT_CONFIG = 2
EXIT_IO = 3


def _parser():
    p = argparse.ArgumentParser(
        prog="caspectral",
        description="Run a seeded frequency-estimation experiment and write one CSV row "
                    "per (point, trial, method).",
        epilog="config keys: " + ", ".join(config_keys()),
    )
    p.add_argument("experiment", choices=sorted(EXPERIMENTS))
    p.add_argument("--config", help="flat key = value file (optional; presets apply otherwise)")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override one config key; repeatable")
    p.add_argument("--out", required=True, help="output CSV path ('-' for stdout)")
    p.add_argument("--seed", type=int, help="unsigned 64-bit base seed")
    p.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    p.add_argument("--no-header-comment", action="store_true",
                   help="omit the timestamp comment line so reruns are byte-identical")
    return p


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        raw = {}
        if args.config:
            try:
                with open(args.config, encoding="utf-8") as fh:
                    raw.update(parse_config(fh.read()))
            except OSError as exc:
                raise ConfigError(f"config: cannot read {args.config}: {exc.strerror}") from None
        for item in args.overrides:
            if "=" not in item:
                raise ConfigError(f"--set: expected KEY=VALUE, got {item!r}")
            key, value = item.split("=", 1)
            raw[key.strip()] = value
        if args.jobs < 1:
            raise ConfigError("--jobs: must be >= 1")
        cfg = load_config(args.experiment, raw, seed=args.seed)
    except ConfigError as exc:
        print(f"caspectral: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        out = sys.stdout if args.out == "-" else open(args.out, "w", encoding="utf-8", newline="")
    except OSError as exc:
        print(f"caspectral: cannot write {args.out}: {exc.strerror}", file=sys.stderr)
        return EXIT_IO

    records = run(cfg, jobs=args.jobs)
    try:
        write_csv(records, out, header_comment=not args.no_header_comment)
        if out is not sys.stdout:
            out.close()
    except OSError as exc:
        print(f"caspectral: cannot write {args.out}: {exc.strerror}", file=sys.stderr)
        return EXIT_IO
    print(summarize(records), end="", file=sys.stderr if out is sys.stdout else sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
