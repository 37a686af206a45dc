"""
Quadrupole coupling of a structured beam to the S1/2 <-> D5/2 line.

The interaction is the contraction of the atomic quadrupole operator with the
symmetric traceless field-gradient tensor. Writing the tensor in rank-2
spherical components T_q (beam frame), rotating into the frame whose z axis is
the magnetic field, and applying the Wigner-Eckart theorem gives

    Omega(m_S -> m_D) = | <5/2 m_D| Q_q |1/2 m_S> T'_q |,   q = m_D - m_S,

with the reduced matrix element set to one. Results are quoted per sqrt(uW) of
beam power ("relative Rabi units"); :func:`calibrate` converts to 2pi kHz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from numpy.polynomial.hermite import hermgauss
from scipy.constants import physical_constants

from .angular import HalfInt, Q_VALUES, cartesian_to_spherical2, wigner3j, wigner_d
from .errors import DomainError
from .lgbeam import LGMode, PolarizationState, symmetric_traceless

J_S = HalfInt(1)
J_D = HalfInt(5)
G_S = 2.0023
G_D = 1.2
MU_B_OVER_H_MHZ_PER_T = physical_constants["Bohr magneton in Hz/T"][0] * 1e-6


@dataclass(frozen=True)
class ZeemanTransition:
    """One |S1/2, m_S> <-> |D5/2, m_D> line."""

    m_S: HalfInt
    m_D: HalfInt

    def __post_init__(self):
        m_S, m_D = HalfInt.of(self.m_S), HalfInt.of(self.m_D)
        if abs(m_S.twice_value) != 1:
            raise DomainError(f"m_S must be +-1/2, got {m_S}")
        if abs(m_D.twice_value) > 5 or m_D.is_integer:
            raise DomainError(f"m_D must be one of -5/2..5/2, got {m_D}")
        object.__setattr__(self, "m_S", m_S)
        object.__setattr__(self, "m_D", m_D)

    @classmethod
    def from_doubled(cls, m2_S: int, m2_D: int) -> "ZeemanTransition":
        return cls(HalfInt(m2_S), HalfInt(m2_D))

    @property
    def delta_m(self) -> int:
        return (self.m_D.twice_value - self.m_S.twice_value) // 2

    def mirrored(self) -> "ZeemanTransition":
        return ZeemanTransition(-self.m_S, -self.m_D)

    def __str__(self):
        return f"S(m={self.m_S}) -> D(m={self.m_D})"


def all_transitions():
    return [
        ZeemanTransition.from_doubled(m2s, m2d)
        for m2s in (-1, 1)
        for m2d in range(-5, 6, 2)
    ]


@dataclass(frozen=True)
class ExperimentGeometry:
    """Orientation of the magnetic field and ion position in the beam frame.

    ``alpha`` is the polar angle of B from the beam axis z, ``phi`` its azimuth
    about z (B lies in the x-z plane for phi = 0, so V polarization along y is
    orthogonal to the plane spanned by B and k).
    """

    alpha: float = 0.0
    ion_offset: tuple = (0.0, 0.0, 0.0)
    B_magnitude: float = 13e-3
    phi: float = 0.0

    def __post_init__(self):
        if not (0 <= self.alpha <= math.pi):
            raise DomainError(f"alpha must lie in [0, pi], got {self.alpha}")
        if not self.B_magnitude > 0:
            raise DomainError(f"B_magnitude must be positive, got {self.B_magnitude}")
        offset = tuple(float(v) for v in self.ion_offset)
        if len(offset) != 3 or not all(math.isfinite(v) for v in offset):
            raise DomainError("ion_offset must be a finite 3-vector")
        object.__setattr__(self, "ion_offset", offset)

    def with_offset(self, offset) -> "ExperimentGeometry":
        return ExperimentGeometry(self.alpha, tuple(offset), self.B_magnitude, self.phi)

    def frame_rotation(self) -> np.ndarray:
        """Matrix taking beam-frame spherical components to B-frame components."""
        m = np.array(Q_VALUES, dtype=float)
        return wigner_d(2, -self.alpha) * np.exp(1j * m * self.phi)[None, :]


@dataclass
class CouplingResult:
    """Power-normalized Rabi frequency and its breakdown.

    ``q_breakdown`` maps each beam-frame spherical index q to its contribution
    to the complex coupling amplitude; the contributions sum to ``amplitude``.
    """

    omega_per_sqrt_uW: float
    amplitude: complex
    q_breakdown: dict = field(default_factory=dict)
    photon_total_m: Optional[int] = None
    omega: float = 0.0


def matrix_element(tr: ZeemanTransition, q: int) -> float:
    """<5/2 m_D| Q_q |1/2 m_S> with unit reduced matrix element."""
    tm_D = tr.m_D.twice_value
    phase = -1 if ((5 - tm_D) // 2) % 2 else 1
    return phase * wigner3j(J_D, 2, J_S, -tr.m_D, q, tr.m_S)


def _channel_tensor(grad, channel: str, first_order: bool) -> np.ndarray:
    if channel == "full":
        G = grad.first_order() if first_order else grad.G
    elif channel == "longitudinal":
        G = grad.longitudinal
    elif channel == "transverse":
        G = (grad.first_order() if first_order else grad.G) - grad.longitudinal
    else:
        raise DomainError(f"unknown gradient channel {channel!r}")
    return symmetric_traceless(G)


def coupling_amplitudes(beam, pol: PolarizationState, geom: ExperimentGeometry,
                        tr: ZeemanTransition, positions, channel: str = "full",
                        first_order: bool = True):
    """Complex coupling amplitudes at an array of positions (shape (..., 3)).

    Returns ``(amplitude, contributions)`` where ``contributions[..., i]`` is the
    share of beam-frame component ``Q_VALUES[i]``.
    """
    q = tr.delta_m
    pos = np.asarray(positions, dtype=float)
    if abs(q) > 2:
        zeros = np.zeros(pos.shape[:-1], dtype=complex)
        return zeros, np.zeros(pos.shape[:-1] + (5,), dtype=complex)
    grad = beam.gradient(pol, pos)
    S = _channel_tensor(grad, channel, first_order)
    T = cartesian_to_spherical2(S).components
    row = geom.frame_rotation()[Q_VALUES.index(q)]
    contributions = matrix_element(tr, q) * row * T
    return contributions.sum(axis=-1), contributions


def _power(beam) -> float:
    return beam.power_P


def rabi_frequency(beam, pol: PolarizationState, geom: ExperimentGeometry,
                   tr: ZeemanTransition, channel: str = "full",
                   first_order: bool = True) -> CouplingResult:
    """Rabi frequency of ``tr`` for an ion at ``geom.ion_offset``.

    ``beam`` is an :class:`LGMode` or a mode mixture. With ``first_order`` the
    gradient tensor is truncated consistently at first paraxial order (this is
    what makes the on-axis nulls of LG_0^{+-2} exact).
    """
    P = _power(beam)
    if P == 0:
        if not isinstance(beam, LGMode):
            raise DomainError("mixture has zero power")
        beam, P = beam.with_power(1.0), 1.0
    amp, contrib = coupling_amplitudes(beam, pol, geom, tr, geom.ion_offset, channel, first_order)
    amp = complex(amp)
    scale = 1 / math.sqrt(P)
    l = getattr(beam, "l", None)
    sigma = pol.helicity()
    m_ph = sigma + l if (sigma is not None and l is not None) else None
    return CouplingResult(
        omega_per_sqrt_uW=abs(amp) * scale,
        amplitude=amp * scale,
        q_breakdown={qq: complex(c) * scale for qq, c in zip(Q_VALUES, contrib)},
        photon_total_m=m_ph,
        omega=abs(amp),
    )


def beam_for(l: int, w0: float, lam: float, p: int = 0) -> LGMode:
    return LGMode(p=p, l=l, waist_w0=w0, wavelength_lambda=lam, power_P=1.0)


def selection_rule_table(w0: float, lam: float, ls: Sequence[int] = (-1, 0, 1),
                         first_order: bool = True) -> list:
    """Axial-geometry table of power-normalized couplings.

    One row per (sigma, l, m_S, delta_m) with delta_m in -2..2, as dicts with keys
    ``sigma, l, m_S, m_D, delta_m, omega``.
    """
    geom = ExperimentGeometry(alpha=0.0)
    pols = {1: PolarizationState.sigma_plus(), -1: PolarizationState.sigma_minus()}
    rows = []
    for sigma in (1, -1):
        for l in ls:
            mode = beam_for(l, w0, lam)
            for m2_S in (-1, 1):
                for dm in range(-2, 3):
                    tr = ZeemanTransition.from_doubled(m2_S, m2_S + 2 * dm)
                    res = rabi_frequency(mode, pols[sigma], geom, tr, first_order=first_order)
                    rows.append(dict(sigma=sigma, l=l, m_S=tr.m_S, m_D=tr.m_D,
                                     delta_m=dm, omega=res.omega_per_sqrt_uW))
    return rows


def gaussian_vortex_ratio(w0: float = 2.7, lam: float = 729.0, sigma: int = 1) -> float:
    """Gaussian-to-vortex coupling ratio for co-rotating spin and OAM.

    Compares the LG_0^0 line with delta_m = sigma against the LG_0^sigma line with
    delta_m = 2 sigma, both driven with helicity sigma from m_S = -sigma/2. This
    pairing isolates the field-gradient factor and equals pi w0 / lambda.
    """
    pol = PolarizationState.sigma_plus() if sigma > 0 else PolarizationState.sigma_minus()
    geom = ExperimentGeometry(alpha=0.0)
    m2_S = -sigma
    gauss = rabi_frequency(beam_for(0, w0, lam), pol, geom,
                           ZeemanTransition.from_doubled(m2_S, m2_S + 2 * sigma))
    vortex = rabi_frequency(beam_for(sigma, w0, lam), pol, geom,
                            ZeemanTransition.from_doubled(m2_S, m2_S + 4 * sigma))
    return gauss.omega_per_sqrt_uW / vortex.omega_per_sqrt_uW


def position_scan(beam, pol: PolarizationState, geom: ExperimentGeometry, tr: ZeemanTransition,
                  axis, offsets, channel: str = "full", first_order: bool = True) -> list:
    """Power-normalized Rabi frequency along ``ion_offset + offset * axis``.

    ``channel`` restricts the coupling to the longitudinal-gradient part
    (``"longitudinal"``), the transverse-gradient part (``"transverse"``), or
    uses the whole tensor (``"full"``).
    """
    offsets = np.asarray(list(offsets), dtype=float)
    if offsets.size == 0:
        return []
    axis = np.asarray(axis, dtype=float)
    norm = np.linalg.norm(axis)
    if norm == 0:
        raise DomainError("scan axis must be nonzero")
    axis = axis / norm
    P = _power(beam)
    if P == 0:
        beam, P = beam.with_power(1.0), 1.0
    pos = np.asarray(geom.ion_offset) + offsets[:, None] * axis
    amp, _ = coupling_amplitudes(beam, pol, geom, tr, pos, channel, first_order)
    omega = np.abs(amp) / math.sqrt(P)
    return [(float(o), float(w)) for o, w in zip(offsets, omega)]


def thermal_average(beam, pol: PolarizationState, geom: ExperimentGeometry, tr: ZeemanTransition,
                    sigma_thermal: float, order: int = 20, channel: str = "full",
                    first_order: bool = True) -> float:
    """RMS power-normalized Rabi frequency sqrt(<|Omega(r)|^2>).

    The ion position is an isotropic 3-D Gaussian with standard deviation
    ``sigma_thermal`` (um) per axis about ``geom.ion_offset``; the average uses
    a tensor-product Gauss-Hermite rule of ``order`` nodes per axis.
    """
    if sigma_thermal < 0:
        raise DomainError("sigma_thermal must be non-negative")
    if sigma_thermal == 0:
        return rabi_frequency(beam, pol, geom, tr, channel, first_order).omega_per_sqrt_uW
    P = _power(beam)
    if P == 0:
        beam, P = beam.with_power(1.0), 1.0
    pos, wts = gauss_hermite_points(geom.ion_offset, sigma_thermal, order)
    amp, _ = coupling_amplitudes(beam, pol, geom, tr, pos, channel, first_order)
    return math.sqrt(float(np.sum(wts * np.abs(amp) ** 2)) / P)


def gauss_hermite_points(center, sigma: float, order: int = 20):
    """Nodes (n^3, 3) and weights (n^3,) for averages over N(center, sigma^2 I)."""
    if order < 1:
        raise DomainError("quadrature order must be positive")
    x, w = hermgauss(order)
    x = x * math.sqrt(2) * sigma
    w = w / math.sqrt(math.pi)
    X, Y, Z = np.meshgrid(x, x, x, indexing="ij")
    W = w[:, None, None] * w[None, :, None] * w[None, None, :]
    pos = np.stack([X.ravel(), Y.ravel(), Z.ravel()], axis=-1) + np.asarray(center, dtype=float)
    return pos, W.ravel()


def transition_frequency_offset(geom: ExperimentGeometry, tr: ZeemanTransition) -> float:
    """Linear Zeeman shift of the line, MHz."""
    return MU_B_OVER_H_MHZ_PER_T * geom.B_magnitude * (
        G_D * float(tr.m_D) - G_S * float(tr.m_S))


def calibrate(measured_omega_kHz: float, power_uW: float, beam, pol, geom, tr) -> float:
    """Scale factor (2pi kHz per relative unit) matching one measured Rabi frequency."""
    if power_uW <= 0:
        raise DomainError("calibration power must be positive")
    rel = rabi_frequency(beam, pol, geom, tr).omega_per_sqrt_uW
    if rel == 0:
        raise DomainError("cannot calibrate against a forbidden transition")
    return measured_omega_kHz / (rel * math.sqrt(power_uW))
