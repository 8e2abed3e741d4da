"""Generate the bundled gold eps''(w) tables.

The tables are synthesized from a Lorentz-Drude oscillator parameterization
of gold (plasma frequency 9.03 eV, five interband oscillators), sampled on
log grids: 0.73-6.3 eV for the measured-range table and 6.3-100 eV for the
UV reference table.
"""
import csv
from pathlib import Path

import numpy as np

WP = 9.03
F0, G0 = 0.760, 0.053
OSC = [  # (f_j, Gamma_j, w_j) in eV
    (0.024, 0.241, 0.415),
    (0.010, 0.345, 0.830),
    (0.071, 0.870, 2.969),
    (0.601, 2.494, 4.304),
    (4.384, 2.214, 13.32),
]


def eps2_gold(w):
    out = F0 * WP**2 * G0 / (w * (w**2 + G0**2))
    for f, g, w0 in OSC:
        out = out + f * WP**2 * w * g / ((w0**2 - w**2) ** 2 + (w * g) ** 2)
    return out


def write(path, w):
    with open(path, "w", newline="") as fh:
        cw = csv.writer(fh)
        cw.writerow(["energy_eV", "eps2"])
        for wi, ki in zip(w, eps2_gold(w)):
            cw.writerow([f"{wi:.9g}", f"{ki:.9g}"])


if __name__ == "__main__":
    out = Path(__file__).resolve().parents[1] / "src" / "fomlab" / "data"
    out.mkdir(parents=True, exist_ok=True)
    write(out / "gold_eps2_visible.csv", np.geomspace(0.73, 6.3, 400))
    write(out / "gold_eps2_uv.csv", np.geomspace(6.3, 100.0, 400))
    print("wrote gold tables to", out)
