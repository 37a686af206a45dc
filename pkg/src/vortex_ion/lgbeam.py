"""
Paraxial Laguerre-Gaussian fields in the focal plane.

The transverse profile of an LG_p^l mode at the focus is

    u(x, y) = C (sqrt(2)/w0)^|l| (x + i sgn(l) y)^|l| L_p^|l|(2 r^2/w0^2) exp(-r^2/w0^2)

with C = sqrt(2P/pi)/w0 * sqrt(p!/(p+|l|)!), so that the integral of |u|^2 over
the plane equals the power P. The azimuthal factor is kept as a Cartesian
polynomial, which makes every derivative at r = 0 exact.

The vector field is E = (u e_x, u e_y, E_z) exp(ikz), where (e_x, e_y) is the
Jones vector and E_z = (i/k)(d_x E_x + d_y E_y) follows from div E = 0 to first
paraxial order. The envelope does not depend on z; only the carrier does.

Units: lengths in micrometers, powers in microwatts. Field amplitudes are in
sqrt(uW)/um, so |u|^2 is an intensity in uW/um^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy.special import eval_genlaguerre

from .errors import DomainError


@dataclass(frozen=True)
class LGMode:
    """A Laguerre-Gaussian mode LG_p^l at its focus.

    Attributes
    ----------
    p : int
        Radial index, p >= 0.
    l : int
        Azimuthal index (OAM per photon).
    waist_w0 : float
        1/e field radius at the focus, micrometers.
    wavelength_lambda : float
        Vacuum wavelength, nanometers.
    power_P : float
        Optical power, microwatts.
    """

    p: int = 0
    l: int = 0
    waist_w0: float = 2.7
    wavelength_lambda: float = 729.0
    power_P: float = 1.0

    def __post_init__(self):
        if int(self.p) != self.p or self.p < 0:
            raise DomainError(f"radial index p must be a non-negative integer, got {self.p}")
        if int(self.l) != self.l:
            raise DomainError(f"azimuthal index l must be an integer, got {self.l}")
        if not (self.waist_w0 > 0 and math.isfinite(self.waist_w0)):
            raise DomainError(f"waist must be positive, got {self.waist_w0}")
        if not (self.wavelength_lambda > 0 and math.isfinite(self.wavelength_lambda)):
            raise DomainError(f"wavelength must be positive, got {self.wavelength_lambda}")
        if not (self.power_P >= 0 and math.isfinite(self.power_P)):
            raise DomainError(f"power must be non-negative, got {self.power_P}")
        object.__setattr__(self, "p", int(self.p))
        object.__setattr__(self, "l", int(self.l))

    @property
    def k(self) -> float:
        """Wavenumber in 1/um."""
        return 2 * np.pi / (self.wavelength_lambda * 1e-3)

    @property
    def amplitude(self) -> float:
        """Normalization constant C of the transverse profile."""
        m = abs(self.l)
        ratio = math.factorial(self.p) / math.factorial(self.p + m)
        return math.sqrt(2 * self.power_P / np.pi) / self.waist_w0 * math.sqrt(ratio)

    def with_power(self, power_P: float) -> "LGMode":
        return replace(self, power_P=power_P)

    def with_waist(self, waist_w0: float) -> "LGMode":
        return replace(self, waist_w0=waist_w0)

    def field(self, pol: "PolarizationState", pos) -> "FieldSample":
        return lg_field(self, pol, pos)

    def gradient(self, pol: "PolarizationState", pos) -> "GradientTensor":
        return lg_gradient_tensor(self, pol, pos)


@dataclass(frozen=True)
class PolarizationState:
    """Transverse Jones vector (x, y), normalized to one."""

    jones: tuple

    def __post_init__(self):
        j = np.asarray(self.jones, dtype=complex).reshape(-1)
        if j.shape != (2,) or not np.all(np.isfinite(j)):
            raise DomainError("Jones vector must be a finite complex 2-vector")
        norm = np.linalg.norm(j)
        if norm == 0:
            raise DomainError("Jones vector must be nonzero")
        j = j / norm
        object.__setattr__(self, "jones", (complex(j[0]), complex(j[1])))

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.jones, dtype=complex)

    @classmethod
    def H(cls):
        return cls((1, 0))

    @classmethod
    def V(cls):
        return cls((0, 1))

    @classmethod
    def sigma_plus(cls):
        return cls((1, 1j))

    @classmethod
    def sigma_minus(cls):
        return cls((1, -1j))

    @classmethod
    def from_name(cls, name: str):
        try:
            return _NAMED[name.strip().lower()]()
        except KeyError:
            raise DomainError(f"unknown polarization {name!r}") from None

    def helicity(self, tol: float = 1e-12):
        """+1 for sigma+, -1 for sigma-, None for anything else."""
        s = self.vector
        if abs(abs(np.vdot(PolarizationState.sigma_plus().vector, s)) - 1) < tol:
            return 1
        if abs(abs(np.vdot(PolarizationState.sigma_minus().vector, s)) - 1) < tol:
            return -1
        return None

    def rotated(self, theta: float) -> "PolarizationState":
        """Jones vector rotated by theta about the beam axis."""
        c, s = math.cos(theta), math.sin(theta)
        ex, ey = self.jones
        return PolarizationState((c * ex - s * ey, s * ex + c * ey))


_NAMED = {
    "h": PolarizationState.H,
    "v": PolarizationState.V,
    "sigma+": PolarizationState.sigma_plus,
    "sigma_plus": PolarizationState.sigma_plus,
    "s+": PolarizationState.sigma_plus,
    "sigma-": PolarizationState.sigma_minus,
    "sigma_minus": PolarizationState.sigma_minus,
    "s-": PolarizationState.sigma_minus,
}


@dataclass(frozen=True)
class FieldSample:
    """Complex field E (shape (..., 3)) at the given positions (shape (..., 3))."""

    E: np.ndarray
    position: np.ndarray

    @property
    def transverse_intensity(self) -> np.ndarray:
        return np.sum(np.abs(self.E[..., :2]) ** 2, axis=-1)


@dataclass(frozen=True)
class GradientTensor:
    """First derivatives of the field, G[..., i, j] = d_i E_j.

    Besides the full tensor, two splits are exposed:

    * ``longitudinal``: the carrier term ik z^ (x) E_t, i.e. the z-gradient of the
      transverse field. It tracks the local field amplitude.
    * ``transverse``: everything else (transverse gradients of E, plus the
      longitudinal field E_z). It tracks the envelope gradient.

    Both parts are separately traceless.
    """

    G: np.ndarray
    position: np.ndarray
    k: float
    E: np.ndarray = field(repr=False)

    @property
    def longitudinal(self) -> np.ndarray:
        out = np.zeros_like(self.G)
        out[..., 2, 0] = 1j * self.k * self.E[..., 0]
        out[..., 2, 1] = 1j * self.k * self.E[..., 1]
        return out

    @property
    def transverse(self) -> np.ndarray:
        return self.G - self.longitudinal

    def first_order(self) -> np.ndarray:
        """Tensor truncated to first paraxial order.

        Drops d_x E_z and d_y E_z, which are O(1/(k w0)^2) relative to the carrier
        gradient. What remains is still exactly divergence-free.
        """
        out = self.G.copy()
        out[..., 0, 2] = 0
        out[..., 1, 2] = 0
        return out

    def symmetric_traceless(self, first_order: bool = True) -> np.ndarray:
        return symmetric_traceless(self.first_order() if first_order else self.G)


def symmetric_traceless(G: np.ndarray) -> np.ndarray:
    S = 0.5 * (G + np.swapaxes(G, -1, -2))
    tr = np.trace(S, axis1=-2, axis2=-1)
    return S - tr[..., None, None] / 3 * np.eye(3)


def _positions(pos) -> np.ndarray:
    r = np.asarray(pos, dtype=float)
    if r.shape[-1:] != (3,):
        raise DomainError(f"positions must have a trailing axis of length 3, got shape {r.shape}")
    if not np.all(np.isfinite(r)):
        raise DomainError("position must be finite")
    return r


def _envelope(mode: LGMode, x, y):
    """u, its gradient (u_x, u_y) and Hessian (u_xx, u_xy, u_yy) in closed form."""
    m = abs(mode.l)
    s = 1 if mode.l >= 0 else -1
    w0 = mode.waist_w0
    A = mode.amplitude * (math.sqrt(2) / w0) ** m
    rho2 = x * x + y * y
    t = 2 * rho2 / w0**2
    gauss = np.exp(-rho2 / w0**2)

    def lag(n, alpha):
        if n < 0:
            return np.zeros_like(t)
        return eval_genlaguerre(n, alpha, t)

    L0 = lag(mode.p, m)
    L1 = -lag(mode.p - 1, m + 1)
    L2 = lag(mode.p - 2, m + 2)
    # g(rho^2) = L(2 rho^2/w0^2) exp(-rho^2/w0^2) and its rho^2-derivatives
    g = L0 * gauss
    g1 = (2 * L1 - L0) * gauss / w0**2
    g2 = (4 * L2 - 4 * L1 + L0) * gauss / w0**4

    w = x + 1j * s * y
    iy = 1j * s

    def wpow(n):
        if n < 0:
            return np.zeros_like(w)
        return w**n

    P = wpow(m)
    Px = m * wpow(m - 1)
    Py = iy * Px
    Pxx = m * (m - 1) * wpow(m - 2)
    Pxy = iy * Pxx
    Pyy = -Pxx

    u = A * P * g
    ux = A * (Px * g + P * 2 * x * g1)
    uy = A * (Py * g + P * 2 * y * g1)
    uxx = A * (Pxx * g + 4 * x * Px * g1 + P * (2 * g1 + 4 * x * x * g2))
    uyy = A * (Pyy * g + 4 * y * Py * g1 + P * (2 * g1 + 4 * y * y * g2))
    uxy = A * (Pxy * g + 2 * (y * Px + x * Py) * g1 + P * 4 * x * y * g2)
    return u, (ux, uy), (uxx, uxy, uyy)


def lg_field(mode: LGMode, pol: PolarizationState, pos) -> FieldSample:
    """Field of ``mode`` with polarization ``pol`` at ``pos`` (um, shape (..., 3))."""
    r = _positions(pos)
    x, y, z = r[..., 0], r[..., 1], r[..., 2]
    ex, ey = pol.jones
    k = mode.k
    u, (ux, uy), _ = _envelope(mode, x, y)
    carrier = np.exp(1j * k * z)
    E = np.empty(r.shape, dtype=complex)
    E[..., 0] = ex * u * carrier
    E[..., 1] = ey * u * carrier
    E[..., 2] = 1j / k * (ex * ux + ey * uy) * carrier
    return FieldSample(E=E, position=r)


def lg_gradient_tensor(mode: LGMode, pol: PolarizationState, pos) -> GradientTensor:
    """Closed-form d_i E_j of :func:`lg_field`."""
    r = _positions(pos)
    x, y, z = r[..., 0], r[..., 1], r[..., 2]
    ex, ey = pol.jones
    k = mode.k
    u, (ux, uy), (uxx, uxy, uyy) = _envelope(mode, x, y)
    carrier = np.exp(1j * k * z)
    Ez = 1j / k * (ex * ux + ey * uy)
    E = np.stack([ex * u, ey * u, Ez], axis=-1) * carrier[..., None]

    G = np.empty(r.shape + (3,), dtype=complex)
    G[..., 0, 0] = ex * ux
    G[..., 0, 1] = ey * ux
    G[..., 0, 2] = 1j / k * (ex * uxx + ey * uxy)
    G[..., 1, 0] = ex * uy
    G[..., 1, 1] = ey * uy
    G[..., 1, 2] = 1j / k * (ex * uxy + ey * uyy)
    G[..., :2, :] *= carrier[..., None, None]
    G[..., 2, :] = 1j * k * E
    return GradientTensor(G=G, position=r, k=k, E=E)


class ModeMixture:
    """Coherent superposition of LG modes sharing one wavelength.

    Fields and gradients add component-wise. ``power_P`` is the sum of
    |weight|^2 times the component powers, which is the true power when the
    components are mutually orthogonal (distinct (p, l) with a common waist).
    """

    def __init__(self, modes: Sequence[tuple]):
        modes = [(m, complex(w)) for m, w in modes]
        if not modes:
            raise DomainError("a mixture needs at least one mode")
        if all(w == 0 for _, w in modes):
            raise DomainError("mixture weights are all zero")
        lam = modes[0][0].wavelength_lambda
        if any(m.wavelength_lambda != lam for m, _ in modes):
            raise DomainError("all modes in a mixture must share one wavelength")
        self.modes = modes

    @property
    def wavelength_lambda(self) -> float:
        return self.modes[0][0].wavelength_lambda

    @property
    def k(self) -> float:
        return self.modes[0][0].k

    @property
    def power_P(self) -> float:
        return sum(abs(w) ** 2 * m.power_P for m, w in self.modes)

    def field(self, pol: PolarizationState, pos) -> FieldSample:
        samples = [(lg_field(m, pol, pos), w) for m, w in self.modes]
        E = sum(w * s.E for s, w in samples)
        return FieldSample(E=E, position=samples[0][0].position)

    def gradient(self, pol: PolarizationState, pos) -> GradientTensor:
        parts = [(lg_gradient_tensor(m, pol, pos), w) for m, w in self.modes]
        G = sum(w * t.G for t, w in parts)
        E = sum(w * t.E for t, w in parts)
        return GradientTensor(G=G, position=parts[0][0].position, k=self.k, E=E)


def mode_mixture(modes: Sequence[tuple]) -> ModeMixture:
    """Build a :class:`ModeMixture` from ``(LGMode, weight)`` pairs."""
    return ModeMixture(modes)
