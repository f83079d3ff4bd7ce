#!/usr/bin/env python3
"""
Reference Batch Runner

Runs every shipped experiment config in configs/ and writes each batch
into its own directory under the output root.

Usage:
    python scripts/run_reference_batches.py [OUT_ROOT]

Environment Variables:
    DELAYCAL_THREADS     - Worker process cap (default: CPU count)
    DELAYCAL_LOG_LEVEL   - Logging level (default: INFO)

Example:
    export DELAYCAL_THREADS=8
    python scripts/run_reference_batches.py out/reference
"""

import os
import sys
from pathlib import Path

# Add parent directory to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from delaycal.cli import main

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"

if __name__ == "__main__":
    out_root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("out/reference")
    configs = sorted(CONFIG_DIR.glob("*.json"))

    print("=" * 60)
    print("delaycal reference batches")
    print("=" * 60)
    print()
    print(f"Configs: {len(configs)} in {CONFIG_DIR}")
    print(f"Output root: {out_root}")
    print(f"Worker cap: {os.getenv('DELAYCAL_THREADS', '(cpu count)')}")
    print()

    failures = 0
    try:
        for config in configs:
            print(f"--- {config.stem}")
            code = main(["montecarlo", "--config", str(config), "--out", str(out_root / config.stem)])
            if code != 0:
                print(f"ERROR: {config.name} exited with {code}", file=sys.stderr)
                failures += 1
            print()
    except KeyboardInterrupt:
        print("\nReference batches stopped by user")
        sys.exit(1)

    sys.exit(1 if failures else 0)
