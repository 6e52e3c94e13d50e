from __future__ import annotations

import argparse
import logging
import os
import sys

from .config import MODES, ConfigError, load_config
from .runner import EXIT_CONFIG, run


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gpwave", description="Gaussian wave packets of the 1D Gross-Pitaevskii equation")
    ap.add_argument("mode", choices=MODES)
    ap.add_argument("--config", required=True, help="sectioned key-value config file")
    ap.add_argument("--set", dest="overrides", action="append", default=[], metavar="SECTION.KEY=VALUE",
                    help="override a config value (repeatable)")
    ap.add_argument("--workers", type=int, default=1, help="parallel sweep workers")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = load_config(args.config, [f"run.mode={args.mode}", *args.overrides], os.environ)
    except ConfigError as exc:
        print(f"gpwave: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.workers < 1:
        print("gpwave: --workers must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    code = run(config, workers=args.workers)
    if code:
        print(f"gpwave: {args.mode} failed (exit {code}); see {config.run['out_dir']}/failure.json",
              file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
