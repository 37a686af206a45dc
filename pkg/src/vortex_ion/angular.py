"""
Angular-momentum algebra for small j.

Conventions (fixed throughout the package):

* Condon-Shortley phases for Clebsch-Gordan coefficients and 3-j symbols.
* Wigner small-d matrices d^j_{m'm}(beta) = <j m'| exp(-i beta J_y) |j m>,
  rows and columns ordered m = j, j-1, ..., -j.
* Spherical basis vectors e_{+1} = -(x + iy)/sqrt2, e_0 = z, e_{-1} = (x - iy)/sqrt2,
  and rank-2 basis tensors E_q = sum <1 q1; 1 q2 | 2 q> e_{q1} (x) e_{q2}.
  Components of a Cartesian tensor are T_q = sum_ij conj(E_q)_ij S_ij, so that
  under an active rotation R the components transform as T -> D^2(R) T.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, total_ordering
from numbers import Rational

import numpy as np

from .errors import DomainError

J_MAX = 10


@total_ordering
@dataclass(frozen=True)
class HalfInt:
    """An integer or half-integer stored as twice its value."""

    twice_value: int

    def __post_init__(self):
        if int(self.twice_value) != self.twice_value:
            raise DomainError(f"twice_value must be an integer, got {self.twice_value}")
        object.__setattr__(self, "twice_value", int(self.twice_value))

    @classmethod
    def of(cls, value) -> "HalfInt":
        """Exact conversion from int, Fraction, HalfInt or a float that is n/2."""
        if isinstance(value, HalfInt):
            return value
        if isinstance(value, Rational):
            twice = Fraction(value) * 2
        else:
            twice = Fraction(float(value)) * 2
        if twice.denominator != 1:
            raise DomainError(f"{value!r} is not a multiple of 1/2")
        return cls(int(twice))

    @property
    def value(self) -> Fraction:
        return Fraction(self.twice_value, 2)

    @property
    def is_integer(self) -> bool:
        return self.twice_value % 2 == 0

    def __float__(self):
        return self.twice_value / 2

    def __add__(self, other):
        return HalfInt(self.twice_value + HalfInt.of(other).twice_value)

    __radd__ = __add__

    def __sub__(self, other):
        return HalfInt(self.twice_value - HalfInt.of(other).twice_value)

    def __rsub__(self, other):
        return HalfInt.of(other) - self

    def __neg__(self):
        return HalfInt(-self.twice_value)

    def __eq__(self, other):
        try:
            return self.twice_value == HalfInt.of(other).twice_value
        except (DomainError, TypeError, ValueError):
            return NotImplemented

    def __lt__(self, other):
        return self.twice_value < HalfInt.of(other).twice_value

    def __hash__(self):
        return hash(self.twice_value)

    def __str__(self):
        if self.is_integer:
            return str(self.twice_value // 2)
        return f"{self.twice_value}/2"


def _twice(x) -> int:
    return HalfInt.of(x).twice_value


def _check_limit(*twice_js):
    for tj in twice_js:
        if tj > 2 * J_MAX:
            raise DomainError(f"angular momentum {tj / 2} exceeds the supported limit j <= {J_MAX}")


@lru_cache(maxsize=None)
def _wigner3j_twice(tj1, tj2, tj3, tm1, tm2, tm3) -> float:
    # Racah formula evaluated in exact rationals; all arguments are doubled.
    if tm1 + tm2 + tm3 != 0:
        return 0.0
    if min(tj1, tj2, tj3) < 0:
        return 0.0
    if abs(tm1) > tj1 or abs(tm2) > tj2 or abs(tm3) > tj3:
        return 0.0
    if (tj1 - tm1) % 2 or (tj2 - tm2) % 2 or (tj3 - tm3) % 2:
        return 0.0
    if tj3 > tj1 + tj2 or tj3 < abs(tj1 - tj2) or (tj1 + tj2 + tj3) % 2:
        return 0.0

    f = math.factorial
    a = (tj1 + tj2 - tj3) // 2
    b = (tj1 - tj2 + tj3) // 2
    c = (-tj1 + tj2 + tj3) // 2
    triangle = Fraction(f(a) * f(b) * f(c), f((tj1 + tj2 + tj3) // 2 + 1))
    norm = (
        f((tj1 + tm1) // 2) * f((tj1 - tm1) // 2)
        * f((tj2 + tm2) // 2) * f((tj2 - tm2) // 2)
        * f((tj3 + tm3) // 2) * f((tj3 - tm3) // 2)
    )
    # k runs over the values where every factorial argument is non-negative
    k1 = (tj3 - tj2 + tm1) // 2
    k2 = (tj3 - tj1 - tm2) // 2
    k3 = (tj1 + tj2 - tj3) // 2
    k4 = (tj1 - tm1) // 2
    k5 = (tj2 + tm2) // 2
    total = Fraction(0)
    for k in range(max(0, -k1, -k2), min(k3, k4, k5) + 1):
        denom = f(k) * f(k1 + k) * f(k2 + k) * f(k3 - k) * f(k4 - k) * f(k5 - k)
        total += Fraction((-1) ** k, denom)
    if total == 0:
        return 0.0
    phase = -1 if ((tj1 - tj2 - tm3) // 2) % 2 else 1
    square = triangle * norm * total * total
    return phase * (1 if total > 0 else -1) * math.sqrt(square)


def wigner3j(j1, j2, j3, m1, m2, m3) -> float:
    """Wigner 3-j symbol (j1 j2 j3; m1 m2 m3).

    Arguments may be ``HalfInt`` or anything exactly representable as n/2.
    Returns 0 when the triangle or projection conditions fail.
    """
    t = [_twice(v) for v in (j1, j2, j3, m1, m2, m3)]
    _check_limit(*t[:3])
    return _wigner3j_twice(*t)


def clebsch_gordan(j1, m1, j2, m2, J, M) -> float:
    """<j1 m1; j2 m2 | J M> with Condon-Shortley phases."""
    tj1, tm1, tj2, tm2, tJ, tM = (_twice(v) for v in (j1, m1, j2, m2, J, M))
    _check_limit(tj1, tj2, tJ)
    if tM != tm1 + tm2:
        return 0.0
    phase = -1 if ((tj1 - tj2 + tM) // 2) % 2 else 1
    return phase * math.sqrt(tJ + 1) * _wigner3j_twice(tj1, tj2, tJ, tm1, tm2, -tM)


def m_values(j) -> list:
    """Projections j, j-1, ..., -j as HalfInt (the matrix ordering used here)."""
    tj = _twice(j)
    return [HalfInt(tm) for tm in range(tj, -tj - 1, -2)]


def wigner_d(j, beta: float) -> np.ndarray:
    """Real (2j+1) x (2j+1) matrix d^j_{m'm}(beta), rows m', columns m, from +j down."""
    tj = _twice(j)
    if tj < 0:
        raise DomainError("j must be non-negative")
    _check_limit(tj)
    f = math.factorial
    c, s = math.cos(beta / 2), math.sin(beta / 2)
    ms = range(tj, -tj - 1, -2)
    d = np.zeros((tj + 1, tj + 1))
    for a, tmp in enumerate(ms):
        for b, tm in enumerate(ms):
            jp, jm = (tj + tm) // 2, (tj - tm) // 2
            jpp, jmp = (tj + tmp) // 2, (tj - tmp) // 2
            pre = math.sqrt(f(jp) * f(jm) * f(jpp) * f(jmp))
            delta = (tmp - tm) // 2
            acc = 0.0
            for k in range(max(0, -delta), min(jp, jmp) + 1):
                den = f(jp - k) * f(k) * f(jmp - k) * f(k + delta)
                acc += (-1) ** (k + delta) * c ** (tj - 2 * k - delta) * s ** (2 * k + delta) / den
            d[a, b] = pre * acc
    return d


def wigner_D(j, alpha: float, beta: float, gamma: float) -> np.ndarray:
    """D^j_{m'm}(alpha, beta, gamma) = exp(-i m' alpha) d^j_{m'm}(beta) exp(-i m gamma)."""
    m = np.array([float(v) for v in m_values(j)])
    return np.exp(-1j * m[:, None] * alpha) * wigner_d(j, beta) * np.exp(-1j * m[None, :] * gamma)


# --- rank-2 spherical tensors -------------------------------------------------

Q_VALUES = (2, 1, 0, -1, -2)

_SQ2 = math.sqrt(2.0)
_E_VEC = {
    1: np.array([-1, -1j, 0]) / _SQ2,
    0: np.array([0, 0, 1], dtype=complex),
    -1: np.array([1, -1j, 0]) / _SQ2,
}


def _rank2_basis() -> dict:
    basis = {}
    for q in Q_VALUES:
        E = np.zeros((3, 3), dtype=complex)
        for q1 in (1, 0, -1):
            q2 = q - q1
            if abs(q2) > 1:
                continue
            E += clebsch_gordan(1, q1, 1, q2, 2, q) * np.outer(_E_VEC[q1], _E_VEC[q2])
        basis[q] = E
    return basis


RANK2_BASIS = _rank2_basis()
_BASIS_STACK = np.stack([RANK2_BASIS[q] for q in Q_VALUES])


@dataclass(frozen=True)
class SphericalTensor2:
    """Components T_q, stored in the order q = +2, +1, 0, -1, -2."""

    components: np.ndarray

    def __getitem__(self, q: int) -> complex:
        return self.components[..., Q_VALUES.index(q)]

    def as_dict(self) -> dict:
        return {q: complex(self[q]) for q in Q_VALUES}

    def rotated(self, D: np.ndarray) -> "SphericalTensor2":
        return SphericalTensor2(np.einsum("ab,...b->...a", D, self.components))

    def to_cartesian(self) -> np.ndarray:
        return spherical_to_cartesian2(self)


def cartesian_to_spherical2(S: np.ndarray) -> SphericalTensor2:
    """Rank-2 spherical components of the symmetric traceless part of ``S``.

    Accepts a single 3x3 matrix or a stack (..., 3, 3).
    """
    S = np.asarray(S, dtype=complex)
    S = 0.5 * (S + np.swapaxes(S, -1, -2))
    S = S - np.trace(S, axis1=-2, axis2=-1)[..., None, None] / 3 * np.eye(3)
    return SphericalTensor2(np.einsum("qij,...ij->...q", _BASIS_STACK.conj(), S))


def spherical_to_cartesian2(T: SphericalTensor2) -> np.ndarray:
    return np.einsum("qij,...q->...ij", _BASIS_STACK, T.components)


def rotation_y(beta: float) -> np.ndarray:
    c, s = math.cos(beta), math.sin(beta)
    return np.array([[c, 0, s], [0, 1, 0], [-s, 0, c]])


def rotation_z(phi: float) -> np.ndarray:
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])
