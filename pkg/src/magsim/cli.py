"""Command-line entry point: ``magsim <command> --config <path> [--out DIR] [--seed N]``."""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
import time

from .commands import COMMANDS, validate
from .config import PRESETS, load_config
from .errors import MagsimError
from .output import run_metadata, write_outputs
from .rng import SEED_MASK

log = logging.getLogger("magsim")

EXIT_CODES = {"config": 2, "domain": 3, "dark-port": 3, "no-signal": 3, "io": 4}


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value <= SEED_MASK:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="magsim", description=__doc__)
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument(
        "--config",
        required=True,
        help=f"TOML/JSON config file, or a bundled preset name ({', '.join(PRESETS)})",
    )
    p.add_argument("--out", help="output directory (overrides [output].dir)")
    p.add_argument("--seed", type=_seed, help="64-bit seed (overrides the config seed)")
    p.add_argument("--workers", type=int, default=1, help="processes for sweep points")
    p.add_argument("--validate", action="store_true", help="check the config and exit")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _fail(category: str, message: str) -> int:
    print(json.dumps({"error": category, "message": message}), file=sys.stderr)
    return EXIT_CODES.get(category, 1)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        config = load_config(args.config)
        if args.seed is not None:
            config = dataclasses.replace(config, seed=args.seed)
        validate(args.command, config)
        if args.validate:
            log.info("%s: config OK (%s)", args.command, config.config_hash[:12])
            return 0
        out_dir = args.out or config.output_dir or f"out/{args.command}"
        t0 = time.perf_counter()
        tables, summary = COMMANDS[args.command](config, workers=max(args.workers, 1))
        wall = time.perf_counter() - t0
        meta = run_metadata(args.command, config.config_hash, config.seed, wall, summary=summary)
        for path in write_outputs(tables, meta, out_dir):
            log.info("wrote %s", path)
    except MagsimError as exc:
        return _fail(exc.category, str(exc))
    except OSError as exc:
        return _fail("io", str(exc))
    return 0


if __name__ == "__main__":
    sys.exit(main())
