"""Generate the bundled patch-potential force-gradient realizations.

Four synthetic sample realizations, each about 1 % of the gold-gold
Casimir force gradient over the measurement range, with sample-to-sample
variation of order half that magnitude.
"""
import csv
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))
from fomlab.casimir import gold_air_stack, gradient_curve  # noqa: E402

OUT = Path(__file__).resolve().parents[1] / "src" / "fomlab" / "data"
R = 40e-6


def main():
    rng = np.random.default_rng(4)
    seps = np.geomspace(40e-9, 1.5e-6, 25)
    cas = gradient_curve(gold_air_stack(), R, seps)
    rows = []
    base = 0.01 * cas.values
    for _ in range(4):
        # smooth per-sample modulation of the patch contribution
        wobble = 1.0 + 0.4 * rng.standard_normal() + \
            0.2 * rng.standard_normal() * np.log(seps / 100e-9)
        rows.append(base * np.abs(wobble))
    with open(OUT / "patch_gradients.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["d_m"] + [f"dFdd_{i+1}" for i in range(len(rows))])
        for k, d in enumerate(seps):
            w.writerow([f"{d:.9g}"] + [f"{r[k]:.9g}" for r in rows])
    frac = np.mean([r / cas.values for r in rows], axis=0)
    print(f"mean fraction of Casimir gradient: {frac.mean():.3%}")


if __name__ == "__main__":
    main()
