#!/usr/bin/env python3
"""Run every experiment config in order and summarize the exit codes."""

import subprocess
import sys
from pathlib import Path

CONFIGS = [
    "triangle.json",
    "marc.json",
    "bracket.json",
    "sublevel.json",
    "ttt_maximal.json",
    "ttt_asymmetric.json",
    "knapp_maximal.json",
    "knapp_asymmetric.json",
    "knapp_harmonic.json",
]


def main() -> int:
    root = Path(__file__).resolve().parent.parent
    worst = 0
    for name in CONFIGS:
        cfg = root / "configs" / name
        print(f"== lab run {cfg.relative_to(root)}")
        code = subprocess.call([sys.executable, "-m", "radonlab.cli", "run", str(cfg)],
                               cwd=root)
        print(f"   exit {code}")
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
