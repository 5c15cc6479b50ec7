#!/usr/bin/env python3
"""Print a Knapp scaling table (measures, pairing, fitted slopes) for one model.

Usage: python scripts/knapp_sweep_table.py [model_id] [budget]
"""

import sys

from radonlab.knapp import default_epsilons, knapp_sweep, slope_fit
from radonlab.models import get_model


def main() -> int:
    model_id = sys.argv[1] if len(sys.argv) > 1 else "maximal_r5"
    budget = int(sys.argv[2]) if len(sys.argv) > 2 else 10 ** 6
    model = get_model(model_id)
    rows = knapp_sweep(model, default_epsilons(model), budget, seed=20250809,
                       workers=4)
    print(f"model {model_id}  (n_L, n_R, ell) = {model.dimension_triple}")
    print(f"{'eps':>12} {'|F|':>14} {'|G|':>14} {'B':>14} {'stderr(B)':>12}")
    for r in rows:
        print(f"{r.eps:>12.6g} {r.meas_f:>14.6g} {r.meas_g:>14.6g} "
              f"{r.pairing:>14.6g} {r.pairing_stderr:>12.3g}")
    eps = [r.eps for r in rows]
    for name, vals in [("|F|", [r.meas_f for r in rows]),
                       ("|G|", [r.meas_g for r in rows]),
                       ("B", [r.pairing for r in rows])]:
        slope, r2 = slope_fit(eps, vals, min_points=min(4, len(eps)))
        print(f"slope {name}: {slope:+.3f}  (r^2 = {r2:.5f})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
