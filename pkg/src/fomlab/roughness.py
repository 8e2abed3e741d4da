"""Topography-based roughness analysis: sphere fitting, median-filter
separation of short-range roughness, and oriented-PFA force corrections
over an ensemble of candidate points of least separation (POLS).

The pixel-by-pixel correction replaces the smooth-sphere PFA contribution
with the rough-sphere contribution wherever topography is known:

    F_r(d) = F_s(d) - sum_ij A [ pp(h_s(i,j)) - pp(h_r(i,j)) ],

with A the pixel area, h_s the smooth local gap and h_r = h_s - roughness
(heights referenced to the patch median, since the height distribution is
skewed).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.ndimage import median_filter
from scipy.optimize import least_squares

from .constants import EPS0, HBAR, C_LIGHT
from .exceptions import ContactError, ConvergenceError, InsufficientDataError

__all__ = [
    "TopographyMap",
    "PolsEnsemble",
    "remove_sphere_fit",
    "separate_roughness",
    "oriented_pfa_force",
    "pols_grid",
    "ensemble_stats",
    "electrostatic_cprime_density",
    "casimir_pressure_density",
    "separation_offsets",
    "roundness_stats",
    "load_topography",
    "load_topography_csv",
    "save_topography",
]


@dataclass
class TopographyMap:
    """Gridded surface heights (m) with a square pixel pitch (m/px)."""

    heights: np.ndarray
    pitch: float

    def __post_init__(self):
        self.heights = np.asarray(self.heights, dtype=float)
        if self.heights.ndim != 2:
            raise ValueError("heights must be a 2-D grid")
        if not np.all(np.isfinite(self.heights)):
            raise ValueError("heights must be finite")
        if self.pitch <= 0:
            raise ValueError("pitch must be positive")

    @property
    def shape(self):
        return self.heights.shape

    def rms(self) -> float:
        h = self.heights - self.heights.mean()
        return float(np.sqrt(np.mean(h**2)))


def load_topography(path) -> TopographyMap:
    """Read a flat float64 binary map with its JSON sidecar header."""
    path = Path(path)
    if path.suffix == ".csv":
        raise ValueError("CSV topography requires a pitch; use load_topography_csv")
    header = json.loads(path.with_suffix(".json").read_text())
    h = np.fromfile(path, dtype="<f8").reshape(header["rows"], header["cols"])
    return TopographyMap(h, header["pitch_m"])


def load_topography_csv(path, pitch) -> TopographyMap:
    return TopographyMap(np.loadtxt(path, delimiter=","), pitch)


def save_topography(m: TopographyMap, path):
    path = Path(path)
    m.heights.astype("<f8").tofile(path)
    path.with_suffix(".json").write_text(json.dumps(
        {"rows": m.shape[0], "cols": m.shape[1], "pitch_m": m.pitch}
    ))


def _cap_height(x, y, x0, y0, z0, R):
    """Upper hemisphere z(x, y) of a sphere with center (x0, y0, z0)."""
    r2 = (x - x0) ** 2 + (y - y0) ** 2
    return z0 + np.sqrt(np.maximum(R**2 - r2, 0.0))


def remove_sphere_fit(m: TopographyMap, R_guess: float):
    """Least-squares sphere fit; returns (residual map, fitted R, center).

    The fitted cap is subtracted from the image; the center is
    (x0, y0, z0) in meters with the sphere center below the surface.
    """
    ny, nx = m.shape
    y, x = np.mgrid[0:ny, 0:nx] * m.pitch
    z = m.heights
    zmax = z.max()
    p0 = np.array([x.mean(), y.mean(), zmax - R_guess, R_guess])

    def resid(p):
        x0, y0, z0, R = p
        return (np.sqrt((x - x0) ** 2 + (y - y0) ** 2 + (z - z0) ** 2) - R).ravel()

    sol = least_squares(resid, p0, method="lm")
    if not sol.success:
        raise ConvergenceError(
            f"sphere fit failed: {sol.message}", achieved=float(np.linalg.norm(sol.fun))
        )
    x0, y0, z0, R = sol.x
    residual = TopographyMap(z - _cap_height(x, y, x0, y0, z0, R), m.pitch)
    return residual, float(R), (float(x0), float(y0), float(z0))


def separate_roughness(residual: TopographyMap, filter_px: int = 64) -> TopographyMap:
    """Short-range roughness: residual minus its median filter (reflect
    padding), removing long-range distortion."""
    if filter_px >= min(residual.shape):
        raise ValueError("filter size must be smaller than the map")
    lowpass = median_filter(residual.heights, size=filter_px, mode="reflect")
    return TopographyMap(residual.heights - lowpass, residual.pitch)


def electrostatic_cprime_density(h):
    """Parallel-plate capacitance-gradient area density -eps0/h^2 (F/m^3)."""
    return -EPS0 / h**2


def casimir_pressure_density(h):
    """Ideal-conductor Casimir pressure pi^2 hbar c / (240 h^4) (N/m^2)."""
    return np.pi**2 * HBAR * C_LIGHT / (240.0 * h**4)


def _local_gaps(rough: TopographyMap, pols, d, R, stride=1):
    i0, j0 = pols
    h = rough.heights[::stride, ::stride]
    ny, nx = h.shape
    y, x = np.mgrid[0:ny, 0:nx].astype(float) * (rough.pitch * stride)
    r2 = (y - (i0 // stride) * rough.pitch * stride) ** 2 + \
        (x - (j0 // stride) * rough.pitch * stride) ** 2
    inside = r2 < R**2
    sag = np.where(inside, R - np.sqrt(np.maximum(R**2 - r2, 0.0)), np.inf)
    h_ref = h - np.median(h)
    return d + sag, d + sag - h_ref


def oriented_pfa_force(rough: TopographyMap, pols, d, R, pp_density,
                       smooth_value, stride: int = 1):
    """Roughness-corrected force/gradient for one POLS placement.

    pp_density maps a local gap (m) to a per-area density; smooth_value is
    the full smooth-sphere result the correction is applied to. Pixels
    outside the imaged patch keep their smooth contribution.
    """
    h_s, h_r = _local_gaps(rough, pols, d, R, stride)
    finite = np.isfinite(h_s)
    if np.any(h_r[finite] <= 0):
        idx = np.argwhere(finite & (h_r <= 0))[0]
        raise ContactError(
            f"pixel {tuple(int(v) * stride for v in idx)} reaches zero gap at d={d:.3e}"
        )
    area = (rough.pitch * stride) ** 2
    corr = area * np.sum(pp_density(h_s[finite]) - pp_density(h_r[finite]))
    return smooth_value - corr


def pols_grid(m: TopographyMap, count: int = 49, margin_px: int = 64):
    """Uniform sqrt(count) x sqrt(count) lattice of POLS candidates."""
    side = int(round(np.sqrt(count)))
    if side * side != count:
        raise ValueError("count must be a perfect square")
    ny, nx = m.shape
    ii = np.linspace(margin_px, ny - 1 - margin_px, side).round().astype(int)
    jj = np.linspace(margin_px, nx - 1 - margin_px, side).round().astype(int)
    return [(int(i), int(j)) for i in ii for j in jj]


@dataclass
class PolsEnsemble:
    """Candidate points of least separation on a topography map."""

    offsets: list
    map_shape: tuple

    def __post_init__(self):
        ny, nx = self.map_shape
        for i, j in self.offsets:
            if not (0 <= i < ny and 0 <= j < nx):
                raise ValueError(f"POLS ({i}, {j}) outside map bounds")

    @classmethod
    def uniform(cls, m: TopographyMap, count: int = 49, margin_px: int = 64):
        return cls(pols_grid(m, count, margin_px), m.shape)

    def __len__(self):
        return len(self.offsets)

    def __iter__(self):
        return iter(self.offsets)

    def subset(self, count: int):
        """Evenly spaced subset, e.g. for plotting 16 of 49 members."""
        idx = np.linspace(0, len(self.offsets) - 1, count).round().astype(int)
        return PolsEnsemble([self.offsets[i] for i in idx], self.map_shape)


def ensemble_stats(values, coverage: float = 0.68):
    """Empirical central estimate and coverage interval (no Gaussian
    assumption; the correction distribution is irregular)."""
    values = np.asarray(values, dtype=float)
    if len(values) < 2:
        raise InsufficientDataError("need at least two ensemble members")
    lo = 50 * (1 - coverage)
    return float(np.median(values)), (
        float(np.percentile(values, lo)),
        float(np.percentile(values, 100 - lo)),
    )


def separation_offsets(rough: TopographyMap, pols_list, R, separations,
                       stride: int = 1):
    """Effective electrostatic separation offset for each POLS.

    For each POLS the roughness-corrected C'(d) curve is fit to the smooth
    PFA form -2 pi eps0 R/(d - d0) with d0 free; returns the offsets (m).
    """
    separations = np.asarray(separations, dtype=float)
    offsets = []
    for pols in pols_list:
        cp = np.array([
            oriented_pfa_force(rough, pols, d, R, electrostatic_cprime_density,
                               -2 * np.pi * EPS0 * R / d, stride)
            for d in separations
        ])

        def resid(p, cp=cp):
            return cp + 2 * np.pi * EPS0 * R / (separations - p[0])

        sol = least_squares(resid, [0.0], method="lm")
        offsets.append(float(sol.x[0]))
    return np.array(offsets)


def roundness_stats(angles_deg, radii):
    """Mean radius and its standard deviation from a perimeter profile."""
    radii = np.asarray(radii, dtype=float)
    return float(radii.mean()), float(radii.std())
