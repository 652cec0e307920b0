#!/usr/bin/env python3
"""
Run every reproduction scenario and print a one-line verdict per scenario.

Usage:
  python scripts/run_repro.py                 # all scenarios
  python scripts/run_repro.py cex-qalpha ...  # selected scenarios
  python scripts/run_repro.py --out-dir out   # also write one JSON summary per scenario

Exit status is 0 only when every selected scenario reproduced.
"""
import argparse
import os
import sys
import time
from pathlib import Path

# Add app to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

# Load env
from dotenv import load_dotenv
load_dotenv()

import logging

from app.config import settings
from app.exceptions import WeightSequenceError
from app.services.codecs import report
from app.services.repro import SCENARIOS, run_scenario

logging.basicConfig(level=getattr(logging, settings.LOG_LEVEL), format="%(asctime)s - %(levelname)s - %(message)s")
logger = logging.getLogger(__name__)


def main():
    parser = argparse.ArgumentParser(description="Run the reproduction scenarios.")
    parser.add_argument("names", nargs="*", help="Scenario names (default: all).")
    parser.add_argument("--out-dir", type=Path, help="Write <name>.json summaries here.")
    args = parser.parse_args()

    names = args.names or sorted(SCENARIOS)
    unknown = [n for n in names if n not in SCENARIOS]
    if unknown:
        parser.error(f"unknown scenario(s): {', '.join(unknown)}; choose from {', '.join(sorted(SCENARIOS))}")
    if args.out_dir:
        args.out_dir.mkdir(parents=True, exist_ok=True)

    failed = []
    for name in names:
        started = time.perf_counter()
        try:
            summary = run_scenario(name)
        except WeightSequenceError as e:
            logger.error("%s raised %s: %s", name, type(e).__name__, e)
            failed.append(name)
            continue
        elapsed = time.perf_counter() - started
        print(f"{name}\t{'ok' if summary['ok'] else 'FAILED'}\t{elapsed:.2f}s")
        if not summary["ok"]:
            failed.append(name)
        if args.out_dir:
            (args.out_dir / f"{name}.json").write_bytes(report("json", summary))

    print("-" * 40)
    print(f"{len(names) - len(failed)}/{len(names)} scenarios reproduced")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
