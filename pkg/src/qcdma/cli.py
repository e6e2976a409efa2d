"""Command-line entry point: ``qcdma <scenario> --config FILE --out DIR --seed N``.

Exit codes: 0 success, 2 invalid configuration, 3 numerical divergence,
4 unconverged Lyapunov estimate or Fock truncation.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .config import SCENARIOS, ConfigError, default_text, validate_config
from .errors import DivergenceError, UnconvergedError
from .scenario import run_scenario

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED, EXIT_UNCONVERGED = 0, 2, 3, 4
OUT_ENV = "QCDMA_OUT"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qcdma", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="scenario", required=True, metavar="scenario")
    for name in SCENARIOS:
        sp = sub.add_parser(name, help=f"run the {name} scenario")
        sp.add_argument("--config", type=Path, help="YAML config (defaults used when omitted)")
        sp.add_argument("--out", type=Path, help=f"output directory (or ${OUT_ENV})")
        sp.add_argument("--seed", type=int, required=True)
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--plots", action="store_true", help="also write SVG figures")
    sub.add_parser("defaults", help="print the default configuration")
    return ap


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    if argv[:1] == ["defaults"]:
        sys.stdout.write(default_text())
        return EXIT_OK
    args = build_parser().parse_args(argv)
    try:
        text = args.config.read_text() if args.config else default_text()
        cfg = validate_config(text, overrides={"scenario": args.scenario, "seed": args.seed})
    except OSError as exc:
        print(f"qcdma: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"qcdma: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = args.out or os.environ.get(OUT_ENV) or cfg.output
    if not out:
        print(f"qcdma: no output directory (use --out or ${OUT_ENV})", file=sys.stderr)
        return EXIT_CONFIG
    try:
        man = run_scenario(cfg, out, threads=args.threads, plots=args.plots)
    except DivergenceError as exc:
        print(f"qcdma: divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except UnconvergedError as exc:
        print(f"qcdma: unconverged: {exc}", file=sys.stderr)
        return EXIT_UNCONVERGED
    except ValueError as exc:
        print(f"qcdma: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for name in sorted(man.outputs):
        print(Path(out) / name)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
