#!/usr/bin/env python3
"""Run every example config under scripts/configs through the CLI.

Artifacts land in runs/<config-stem>/.  Exits nonzero if any experiment
fails an assertion or a config is invalid.

Usage: python scripts/run_experiment_suite.py [--workers K] [--only NAME]
"""

import argparse
import sys
import time
from pathlib import Path

from seqchaos.cli import run_config_file

CONFIG_DIR = Path(__file__).parent / "configs"


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--only", default=None, help="substring filter on config names")
    args = parser.parse_args()

    worst = 0
    for cfg in sorted(CONFIG_DIR.glob("*.json")):
        if args.only and args.only not in cfg.stem:
            continue
        out = Path("runs") / cfg.stem
        print(f"=== {cfg.stem} ===")
        started = time.perf_counter()
        status = run_config_file(str(cfg), out_dir=str(out), workers=args.workers)
        print(f"    status={status} elapsed={time.perf_counter() - started:.1f}s")
        worst = max(worst, status)
    return worst


if __name__ == "__main__":
    sys.exit(main())
