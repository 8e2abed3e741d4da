"""Generate the bundled synthetic rough-sphere topography map.

A 512 x 512 image of a 33.2 um sphere cap with correlated short-range
roughness and a slow scan-bow artifact. The roughness amplitude is tuned
so the 49-point POLS ensemble of electrostatic separation offsets has a
standard deviation near 0.2 nm.
"""
import sys
from pathlib import Path

import numpy as np
from scipy.ndimage import gaussian_filter

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))
from fomlab import roughness as rg  # noqa: E402

OUT = Path(__file__).resolve().parents[1] / "src" / "fomlab" / "data"

N = 512
PITCH = 39e-9          # ~20 um field of view
R_TRUE = 33.2e-6
RMS = 4.5e-9           # short-range roughness amplitude
CORR_PX = 3            # correlation length in pixels
BOW = 5e-9


def main():
    rng = np.random.default_rng(20260823)
    y, x = np.mgrid[0:N, 0:N] * PITCH
    c = (N - 1) / 2 * PITCH
    cap = np.sqrt(R_TRUE**2 - (x - c) ** 2 - (y - c) ** 2) - R_TRUE
    rough = gaussian_filter(rng.standard_normal((N, N)), CORR_PX)
    rough *= RMS / rough.std()
    bow = BOW * np.sin(2 * np.pi * y / (N * PITCH))
    m = rg.TopographyMap(cap + rough + bow, PITCH)
    rg.save_topography(m, OUT / "sphere_topography.f64")

    resid, R_fit, _ = rg.remove_sphere_fit(m, 30e-6)
    sr = rg.separate_roughness(resid, 64)
    offs = rg.separation_offsets(
        sr, rg.pols_grid(m, 49, 64), R_fit,
        np.geomspace(100e-9, 1000e-9, 8), stride=2,
    )
    print(f"fitted R = {R_fit*1e6:.3f} um, rms = {sr.rms()*1e9:.2f} nm, "
          f"offset std = {offs.std(ddof=1)*1e9:.3f} nm")


if __name__ == "__main__":
    main()
