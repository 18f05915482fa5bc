#!/usr/bin/env python3
"""Regenerate every bundled figure dataset (fig1..fig8) into one directory.

Usage: python scripts/reproduce_all.py [OUT_DIR]
"""

import sys
import time
from pathlib import Path

from mirror_dce.experiments import FIGURE_ALIASES, reproduce


def main() -> int:
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("datasets")
    t0 = time.time()
    for figure in FIGURE_ALIASES:
        t1 = time.time()
        paths = reproduce(figure, out_dir)
        names = ", ".join(p.name for p in paths)
        print(f"{figure}: {names}  ({time.time() - t1:.1f} s)")
    print(f"done in {time.time() - t0:.1f} s -> {out_dir}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
