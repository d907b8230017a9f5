#!/usr/bin/env python3
"""Regenerate the bundled benchmark instances under src/circlepack/data/instances.

Two classic families plus a few strip cases:
  - zimm-N: radii 1, 2, ..., N in a circular container;
  - eq-N:   N unit circles in a circular container;
  - strip-*: mixed radii in a fixed-width strip (no published reference
    values, so these ship without best_known).
Reference values come from the bundled best-known table where available.
"""

from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from circlepack.bounds import load_best_known
from circlepack.files import write_instance
from circlepack.geometry import Instance, StripContainer

OUT = Path(__file__).resolve().parents[1] / "src" / "circlepack" / "data" / "instances"


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    table = load_best_known()
    written = []

    for n in range(5, 21):
        name = f"zimm-{n:02d}"
        instance = Instance.from_radii(name, [float(k) for k in range(1, n + 1)])
        written.append(write_instance(instance, OUT / f"{name}.json", best_known=table.get(name)))

    for n in (7, 20, 25, 30, 35, 40):
        name = f"eq-{n:02d}"
        instance = Instance.from_radii(name, [1.0] * n)
        written.append(write_instance(instance, OUT / f"{name}.json", best_known=table.get(name)))

    strip_cases = {
        "strip-a": ([2.0, 1.5, 1.5, 1.0, 1.0], 5.0),
        "strip-b": ([1.0] * 6, 4.0),
        "strip-c": ([3.0, 2.0, 2.0, 1.0], 6.5),
    }
    for name, (radii, width) in strip_cases.items():
        instance = Instance.from_radii(name, radii, container=StripContainer(width=width))
        written.append(write_instance(instance, OUT / f"{name}.json", best_known=table.get(name)))

    for path in written:
        print(f"wrote {path.relative_to(OUT.parents[3])}")


if __name__ == "__main__":
    main()
