"""
Two-level pulse sequences, projection noise and sinusoid fitting.

Frequencies are given as f in kHz for an angular frequency 2pi f ("2pi kHz"),
times in microseconds. A duration t at frequency f accumulates 2pi f t 1e-3 rad.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import OptimizeWarning, curve_fit

from .errors import DomainError, InsufficientDataError

KINDS = ("resonant_pulse", "offresonant_exposure", "wait")


def rad_per_us(f_kHz: float) -> float:
    """Angular frequency in rad/us for a frequency given in kHz."""
    return 2 * math.pi * f_kHz * 1e-3


@dataclass(frozen=True)
class Segment:
    """One piece of a pulse sequence.

    For ``offresonant_exposure`` the ``shift`` (2pi kHz) is the ac-Stark shift
    of the transition; it is applied as a phase exp(-i shift t) on the excited
    amplitude. ``detuning`` is the laser detuning from the (unshifted) line
    and acts in every kind of segment.
    """

    kind: str
    duration: float
    omega: float = 0.0
    detuning: float = 0.0
    phase: float = 0.0
    shift: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown segment kind {self.kind!r}")
        if not (self.duration >= 0 and math.isfinite(self.duration)):
            raise DomainError("segment duration must be finite and non-negative")


@dataclass(frozen=True)
class TwoLevelState:
    c_g: complex = 1.0
    c_e: complex = 0.0

    @property
    def P_e(self) -> float:
        return abs(self.c_e) ** 2

    @property
    def norm(self) -> float:
        return abs(self.c_g) ** 2 + abs(self.c_e) ** 2


GROUND = TwoLevelState(1.0, 0.0)


def segment_unitary(seg: Segment) -> np.ndarray:
    """Propagator of ``seg`` in the (g, e) basis, laser rotating frame."""
    t = seg.duration
    if seg.kind == "resonant_pulse":
        W = rad_per_us(seg.omega)
    else:
        W = 0.0
    d = rad_per_us(seg.detuning)
    if seg.kind == "offresonant_exposure":
        d -= rad_per_us(seg.shift)
    # H = (1/2) [[d, W e^{-i phi}], [W e^{i phi}, -d]]
    gen = math.hypot(W, d)
    if gen == 0:
        return np.eye(2, dtype=complex)
    c = math.cos(gen * t / 2)
    s = math.sin(gen * t / 2)
    nx = W * math.cos(seg.phase) / gen
    ny = W * math.sin(seg.phase) / gen
    nz = d / gen
    return np.array([
        [c - 1j * s * nz, -1j * s * (nx - 1j * ny)],
        [-1j * s * (nx + 1j * ny), c + 1j * s * nz],
    ])


def evolve(state: TwoLevelState, segment: Segment) -> TwoLevelState:
    U = segment_unitary(segment)
    cg, ce = U @ np.array([state.c_g, state.c_e], dtype=complex)
    return TwoLevelState(complex(cg), complex(ce))


def run_sequence(segments: Iterable[Segment], state: TwoLevelState = GROUND) -> TwoLevelState:
    for seg in segments:
        state = evolve(state, seg)
    return state


def rabi_probability(omega: float, detuning: float, t) -> np.ndarray:
    """Closed-form P_e(t) from the ground state."""
    W = rad_per_us(omega)
    d = rad_per_us(detuning)
    gen = math.hypot(W, d)
    t = np.asarray(t, dtype=float)
    if gen == 0:
        return np.zeros_like(t)
    return (W / gen) ** 2 * np.sin(gen * t / 2) ** 2


def rabi_trace(omega: float, times: Sequence[float], detuning: float = 0.0) -> np.ndarray:
    """P_e after a single pulse of each duration in ``times``."""
    return np.array([
        evolve(GROUND, Segment("resonant_pulse", t, omega, detuning)).P_e for t in times
    ])


def ramsey_sequence(delta_S: float, t: float, pi2_omega: float, pi2_detuning: float = 0.0,
                    pi2_phase: float = 0.0) -> list:
    t_pi2 = 0.25 / pi2_omega * 1e3
    return [
        Segment("resonant_pulse", t_pi2, pi2_omega, pi2_detuning),
        Segment("offresonant_exposure", t, shift=delta_S),
        Segment("resonant_pulse", t_pi2, pi2_omega, pi2_detuning, pi2_phase),
    ]


def ramsey_trace(delta_S: float, times: Sequence[float], pi2_omega: float = 100.0,
                 pi2_detuning: float = 0.0) -> np.ndarray:
    """P_e after pi/2 - exposure(t) - pi/2 for each t in ``times``.

    With ideal pulses this is (1 + cos(delta_S t))/2.
    """
    if pi2_omega <= 0:
        raise DomainError("pi/2 pulse Rabi frequency must be positive")
    times = np.asarray(times, dtype=float)
    if np.any(times < 0):
        raise DomainError("exposure times must be non-negative")
    return np.array([
        run_sequence(ramsey_sequence(delta_S, t, pi2_omega, pi2_detuning)).P_e for t in times
    ])


def make_rng(seed) -> np.random.Generator:
    if seed is None:
        raise DomainError("an explicit seed is required")
    return np.random.default_rng(np.random.SeedSequence(int(seed)))


def spawn_streams(seed, n: int) -> list:
    """Independent generators for concurrent tasks: SeedSequence(seed).spawn(n)."""
    if seed is None:
        raise DomainError("an explicit seed is required")
    return [np.random.default_rng(s) for s in np.random.SeedSequence(int(seed)).spawn(n)]


def simulate_shots(probabilities, n_shots: int, seed=None, rng=None) -> np.ndarray:
    """Binomial excitation counts, one draw of ``n_shots`` per probability."""
    p = np.asarray(probabilities, dtype=float)
    if np.any(~np.isfinite(p)) or np.any(p < 0) or np.any(p > 1):
        raise DomainError("probabilities must lie in [0, 1]")
    if int(n_shots) != n_shots or n_shots <= 0:
        raise DomainError("n_shots must be a positive integer")
    if rng is None:
        rng = make_rng(seed)
    return rng.binomial(int(n_shots), p)


@dataclass(frozen=True)
class SineFit:
    frequency: float
    amplitude: float
    phase: float
    offset: float
    stderr: float
    covariance: np.ndarray

    def __iter__(self):
        return iter((self.frequency, self.amplitude, self.phase, self.offset, self.stderr))


def _model(t, w, A, phi, B):
    return A * np.cos(w * t + phi) + B


def fit_frequency(times, values, min_samples: int = 8) -> SineFit:
    """Least-squares fit of A cos(2pi f t + phi) + B.

    The frequency is seeded from the peak of a direct periodogram (lowest
    frequency wins ties) and refined with Levenberg-Marquardt. ``frequency``
    and ``stderr`` are in kHz (2pi kHz for the angular frequency) with times in us.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    if t.shape != y.shape or t.ndim != 1:
        raise DomainError("times and values must be 1-D arrays of equal length")
    if t.size < min_samples:
        raise InsufficientDataError(f"need at least {min_samples} samples, got {t.size}")
    order = np.argsort(t)
    t, y = t[order], y[order]
    span = t[-1] - t[0]
    if span <= 0:
        raise InsufficientDataError("samples do not span a time interval")
    yc = y - y.mean()
    if np.ptp(y) <= 1e-12 * max(1.0, np.max(np.abs(y))):
        raise InsufficientDataError("trace has zero amplitude")

    dt = np.min(np.diff(t)[np.diff(t) > 0])
    f_max = 0.5 / dt
    f_min = 1.0 / span
    n_grid = max(64, int(8 * span / dt))
    freqs = np.linspace(f_min, f_max, n_grid)
    power = np.abs(np.exp(-2j * np.pi * np.outer(freqs, t)) @ yc) ** 2
    f0 = freqs[np.argmax(power)]

    w0 = 2 * np.pi * f0
    basis = np.stack([np.cos(w0 * t), np.sin(w0 * t), np.ones_like(t)], axis=1)
    (a, b, B0), *_ = np.linalg.lstsq(basis, y, rcond=None)
    A0 = math.hypot(a, b)
    phi0 = math.atan2(-b, a)
    try:
        with warnings.catch_warnings():
            # an exact fit leaves no residual to scale the covariance
            warnings.simplefilter("ignore", OptimizeWarning)
            popt, pcov = curve_fit(_model, t, y, p0=(w0, A0, phi0, B0),
                                   xtol=1e-15, ftol=1e-15, gtol=1e-15, maxfev=20000)
    except RuntimeError as exc:
        raise InsufficientDataError(f"sinusoid fit did not converge: {exc}") from None
    w, A, phi, B = popt
    if A < 0:
        A, phi = -A, phi + np.pi
    w = abs(w)
    phi = (phi + np.pi) % (2 * np.pi) - np.pi
    if w * span < 2 * np.pi * (1 - 1e-9):
        raise InsufficientDataError("record spans less than one period")
    with np.errstate(invalid="ignore"):
        err_w = math.sqrt(pcov[0, 0]) if np.isfinite(pcov[0, 0]) and pcov[0, 0] >= 0 else 0.0
    to_kHz = 1e3 / (2 * np.pi)
    return SineFit(frequency=w * to_kHz, amplitude=float(A), phase=float(phi), offset=float(B),
                   stderr=err_w * to_kHz, covariance=pcov)
