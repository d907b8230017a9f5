#!/usr/bin/env python3
"""Run the bundled benchmark suite through the CLI bench command.

Thin wrapper fixing the suite directory to the packaged instances; all
other bench flags pass through, e.g.:

    python scripts/run_benchmarks.py --epsilon 0.01 --time-limit 60 --out bench.json
"""

from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

import circlepack
from circlepack.cli import main

if __name__ == "__main__":
    suite = Path(circlepack.__file__).parent / "data" / "instances"
    sys.exit(main(["bench", str(suite), *sys.argv[1:]]))
