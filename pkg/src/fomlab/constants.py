"""Physical constants and Matsubara frequency helpers.

All values come from scipy.constants (CODATA). The chamber temperature
default is 303.15 K, the regulated set point of the instrument the
simulator models.
"""
from dataclasses import dataclass

import numpy as np
from scipy.constants import Boltzmann as K_B
from scipy.constants import c as C_LIGHT
from scipy.constants import epsilon_0 as EPS0
from scipy.constants import hbar as HBAR
from scipy.constants import e as E_CHARGE

#: default chamber temperature (K)
T_CHAMBER = 303.15

#: conversion factor: photon energy in eV -> angular frequency in rad/s
EV_TO_RAD_S = E_CHARGE / HBAR


@dataclass(frozen=True)
class Constants:
    """Bundle of SI constants plus the working temperature."""

    hbar: float = HBAR
    c: float = C_LIGHT
    k_B: float = K_B
    epsilon_0: float = EPS0
    T: float = T_CHAMBER

    def __post_init__(self):
        if self.T <= 0:
            raise ValueError(f"temperature must be positive, got {self.T}")

    @property
    def xi_thermal(self) -> float:
        """First Matsubara angular frequency 2*pi*k_B*T/hbar (rad/s)."""
        return 2.0 * np.pi * self.k_B * self.T / self.hbar

    def matsubara_xi(self, n) -> np.ndarray:
        """Matsubara angular frequencies xi_n = 2*pi*k_B*T*n/hbar (rad/s)."""
        return self.xi_thermal * np.asarray(n, dtype=float)

    def matsubara_xi_ev(self, n) -> np.ndarray:
        """Matsubara frequencies expressed as photon energies (eV)."""
        return self.matsubara_xi(n) / EV_TO_RAD_S


DEFAULT_CONSTANTS = Constants()
