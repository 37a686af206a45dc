"""
ac-Stark shift budgets for penumbra versus bright-lobe operation.

Powers and frequencies carry their units in small value types. Ratios of
two powers or two frequencies are plain floats, so the mW/uW bookkeeping in
the correction formula happens in one place.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coupling import gauss_hermite_points
from .errors import DomainError


@dataclass(frozen=True, order=True)
class Power:
    """Optical power, stored in microwatts."""

    uW_value: float

    @classmethod
    def uW(cls, value: float) -> "Power":
        return cls(float(value))

    @classmethod
    def mW(cls, value: float) -> "Power":
        return cls(float(value) * 1e3)

    @property
    def in_uW(self) -> float:
        return self.uW_value

    @property
    def in_mW(self) -> float:
        return self.uW_value * 1e-3

    def __truediv__(self, other):
        if isinstance(other, Power):
            return self.uW_value / other.uW_value
        return NotImplemented

    def __mul__(self, c):
        return Power(self.uW_value * float(c))

    __rmul__ = __mul__


@dataclass(frozen=True, order=True)
class Frequency:
    """An angular frequency 2pi f, stored as f in kHz."""

    kHz_value: float

    @classmethod
    def kHz(cls, value: float) -> "Frequency":
        return cls(float(value))

    @classmethod
    def MHz(cls, value: float) -> "Frequency":
        return cls(float(value) * 1e3)

    @classmethod
    def Hz(cls, value: float) -> "Frequency":
        return cls(float(value) * 1e-3)

    @property
    def in_kHz(self) -> float:
        return self.kHz_value

    @property
    def in_Hz(self) -> float:
        return self.kHz_value * 1e3

    @property
    def in_MHz(self) -> float:
        return self.kHz_value * 1e-3

    def __add__(self, other):
        return Frequency(self.kHz_value + other.kHz_value)

    def __sub__(self, other):
        return Frequency(self.kHz_value - other.kHz_value)

    def __neg__(self):
        return Frequency(-self.kHz_value)

    def __mul__(self, c):
        return Frequency(self.kHz_value * float(c))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Frequency):
            return self.kHz_value / other.kHz_value
        return Frequency(self.kHz_value / float(other))


def quadrupolar_shift(omega: Frequency, detuning: Frequency) -> Frequency:
    """Off-resonant quadrupole shift Omega^2 / (2 Delta)."""
    if detuning.kHz_value == 0:
        raise DomainError("detuning must be nonzero")
    return Frequency(omega.kHz_value**2 / (2 * detuning.kHz_value))


@dataclass(frozen=True)
class StarkBudget:
    """Measured (or simulated) shift with the quadrupolar part removed.

    delta_S is the total shift at exposure power P_delta; omega is the Rabi
    frequency measured at power P_omega; detuning_Delta the exposure detuning.
    """

    delta_S: Frequency
    P_delta: Power
    omega: Frequency
    P_omega: Power
    detuning_Delta: Frequency

    def __post_init__(self):
        if self.P_delta.uW_value <= 0 or self.P_omega.uW_value <= 0:
            raise DomainError("powers must be positive")

    @property
    def delta_S_prime(self) -> Frequency:
        return corrected_shift(self)[0]

    @property
    def normalized_shift(self) -> float:
        """delta_S' / P_delta in 2pi kHz per mW."""
        return corrected_shift(self)[1]

    @property
    def xi(self) -> float:
        return figure_of_merit(self)


def corrected_shift(budget: StarkBudget):
    """Return (delta_S', delta_S'/P_delta in 2pi kHz/mW)."""
    if budget.P_delta.uW_value <= 0 or budget.P_omega.uW_value <= 0:
        raise DomainError("powers must be positive")
    scale = budget.P_delta / budget.P_omega
    prime = budget.delta_S - quadrupolar_shift(budget.omega, budget.detuning_Delta) * scale
    return prime, prime.in_kHz / budget.P_delta.in_mW


def figure_of_merit(budget: StarkBudget) -> float:
    """xi = (delta_S'/P_delta) / (omega/sqrt(P_omega)).

    Units: (2pi kHz/mW) / (2pi kHz/sqrt(uW)).
    """
    if budget.omega.kHz_value == 0:
        raise DomainError("omega must be nonzero")
    _, per_mW = corrected_shift(budget)
    return per_mW / (budget.omega.in_kHz / math.sqrt(budget.P_omega.in_uW))


@dataclass(frozen=True)
class DipolarCoefficient:
    """Effective dipolar light-shift per intensity, 2pi kHz per (uW/um^2)."""

    kappa: float

    def __post_init__(self):
        if not math.isfinite(self.kappa):
            raise DomainError("kappa must be finite")


def simulate_dipolar_shift(mode, pol, position, kappa, sigma_thermal: float = 0.0,
                           order: int = 20) -> Frequency:
    """kappa times the local transverse intensity |E_t|^2 at ``position``.

    With ``sigma_thermal`` > 0 (um) the intensity is averaged over an isotropic
    Gaussian spread of the ion position.
    """
    k = kappa.kappa if isinstance(kappa, DipolarCoefficient) else float(kappa)
    if sigma_thermal < 0:
        raise DomainError("sigma_thermal must be non-negative")
    if sigma_thermal == 0:
        I = float(mode.field(pol, np.asarray(position, dtype=float)).transverse_intensity)
    else:
        pos, w = gauss_hermite_points(position, sigma_thermal, order)
        I = float(np.sum(w * mode.field(pol, pos).transverse_intensity))
    return Frequency(k * I)


def compare_cases(a: StarkBudget, b: StarkBudget) -> dict:
    """Ratios of the power-normalized corrected shift and of xi, case a over case b."""
    return {
        "normalized_shift_ratio": a.normalized_shift / b.normalized_shift,
        "xi_ratio": a.xi / b.xi,
    }


# Measured penumbra (A) and side-lobe (B) values used for the reproduction mode.
REFERENCE_CASES = {
    "A": dict(delta_S_kHz=1.54, P_delta_mW=7.50, omega_kHz=11.93, P_omega_uW=20.0),
    "B": dict(delta_S_kHz=19.1, P_delta_mW=1.75, omega_kHz=15.67, P_omega_uW=2.6),
}
REFERENCE_DETUNING_MHZ = 25.0


def budget_from_numbers(delta_S_kHz, P_delta_mW, omega_kHz, P_omega_uW, detuning_MHz) -> StarkBudget:
    return StarkBudget(
        delta_S=Frequency.kHz(delta_S_kHz),
        P_delta=Power.mW(P_delta_mW),
        omega=Frequency.kHz(omega_kHz),
        P_omega=Power.uW(P_omega_uW),
        detuning_Delta=Frequency.MHz(detuning_MHz),
    )
