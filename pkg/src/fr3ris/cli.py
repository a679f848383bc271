"""Command-line entry point.

Verbs: run (single point at the configured budget), sweep-power,
sweep-elements, validate-config. Every invocation logs the resolved
config, the master seed, and the package version to stderr, so a run can
be reproduced from its log alone. Error exit codes: 2 bad config or
arguments, 3 numeric domain, 4 I/O, 5 oversized enumeration.
"""

import argparse
import logging
import sys

from . import __version__
from .config import (SCHEME_NAMES, ScenarioConfig, format_config,
                     load_config, watt_to_dbm)
from .errors import ConfigError, DimensionError, NumericError, SizeError
from .experiment import emit_csv, sweep

log = logging.getLogger("fr3ris")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4
EXIT_SIZE = 5


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH",
                        help="flat key=value scenario file (defaults apply)")
    common.add_argument("--seed", type=int, metavar="U64",
                        help="override master_seed")
    common.add_argument("--realizations", type=int, metavar="N",
                        help="override Monte Carlo realization count")
    common.add_argument("--schemes", metavar="LIST",
                        help="comma list among: " + ", ".join(SCHEME_NAMES))

    parser = argparse.ArgumentParser(
        prog="fr3ris",
        description="RIS-assisted FR3 downlink simulator: power allocation "
                    "and IU-RIS association sweeps")
    parser.add_argument("--version", action="version",
                        version=f"fr3ris {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)

    p_run = sub.add_parser("run", parents=[common],
                           help="single sweep point at the configured budget")
    p_run.add_argument("--out", required=True, metavar="PATH",
                       help="output CSV path")

    p_pow = sub.add_parser("sweep-power", parents=[common],
                           help="sum rate vs AP power budget")
    p_pow.add_argument("--out", required=True, metavar="PATH")
    p_pow.add_argument("--values", metavar="LIST",
                       help="comma list of dBm points (default from config)")

    p_el = sub.add_parser("sweep-elements", parents=[common],
                          help="sum rate vs RIS element count")
    p_el.add_argument("--out", required=True, metavar="PATH")
    p_el.add_argument("--values", metavar="LIST",
                      help="comma list of element counts (default from config)")

    sub.add_parser("validate-config", parents=[common],
                   help="parse, validate, and echo the resolved config")
    return parser


def _load(args):
    cfg = load_config(args.config) if args.config else ScenarioConfig()
    if args.seed is not None:
        if not 0 <= args.seed < 2 ** 64:
            raise ConfigError(f"--seed must be in [0, 2^64), got {args.seed}")
        cfg = cfg.with_updates(master_seed=args.seed)
    if args.realizations is not None:
        if args.realizations < 1:
            raise ConfigError(
                f"--realizations must be >= 1, got {args.realizations}")
        cfg = cfg.with_updates(realizations=args.realizations)
    if args.schemes is not None:
        names = tuple(s.strip() for s in args.schemes.split(",") if s.strip())
        if not names:
            raise ConfigError("--schemes list must not be empty")
        for s in names:
            if s not in SCHEME_NAMES:
                raise ConfigError(
                    f"--schemes: {s!r} not one of {', '.join(SCHEME_NAMES)}")
        if len(set(names)) != len(names):
            raise ConfigError("--schemes: duplicate entries")
        cfg = cfg.with_updates(schemes=names)
    return cfg


def _log_run_context(cfg):
    log.info("fr3ris %s", __version__)
    log.info("master seed: %d", cfg.master_seed)
    for line in format_config(cfg).splitlines():
        log.info("config: %s", line)


def _parse_values(raw, cast, what):
    try:
        values = [cast(v.strip()) for v in raw.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"--values: cannot parse {raw!r} as {what}") from None
    if not values:
        raise ConfigError("--values list must not be empty")
    return values


def _probe_output(path):
    # fail on unwritable paths before burning compute
    try:
        with open(path, "a", encoding="utf-8"):
            pass
    except OSError as exc:
        raise OSError(f"output path {path} is not writable: {exc}") from exc


def dispatch(args):
    cfg = _load(args)
    _log_run_context(cfg)
    if args.verb == "validate-config":
        print(format_config(cfg))
        return EXIT_OK

    _probe_output(args.out)
    if args.verb == "run":
        values = [round(watt_to_dbm(cfg.p_max_w), 10)]
        result = sweep(cfg, "power", values)
    elif args.verb == "sweep-power":
        values = (_parse_values(args.values, float, "dBm numbers")
                  if args.values else None)
        result = sweep(cfg, "power", values)
    elif args.verb == "sweep-elements":
        values = (_parse_values(args.values, int, "element counts")
                  if args.values else None)
        result = sweep(cfg, "elements", values)
    else:
        raise ConfigError(f"unknown verb {args.verb!r}")
    emit_csv(result, args.out)
    log.info("wrote %s (%d sweep points, %d schemes, %d realizations)",
             args.out, len(result.values), len(result.schemes),
             result.realizations)
    return EXIT_OK


def main(argv=None):
    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(levelname)s %(message)s")
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return dispatch(args)
    except ConfigError as exc:
        log.error("config: %s", exc)
        return EXIT_CONFIG
    except SizeError as exc:
        log.error("size: %s", exc)
        return EXIT_SIZE
    except (NumericError, DimensionError, ValueError, ArithmeticError) as exc:
        log.error("numeric: %s", exc)
        return EXIT_NUMERIC
    except OSError as exc:
        log.error("io: %s", exc)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
