import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, optimize

from vortex_ion import DomainError
from vortex_ion.lgbeam import LGMode, PolarizationState, lg_field, lg_gradient_tensor, mode_mixture

W0 = 2.7
POLS = [PolarizationState.H(), PolarizationState.V(), PolarizationState.sigma_plus(),
        PolarizationState.sigma_minus(), PolarizationState((0.6, 0.8j))]


def central_differences(mode, pol, pos, h):
    pos = np.asarray(pos, dtype=float)
    out = np.empty((3, 3), dtype=complex)
    for i in range(3):
        d = np.zeros(3)
        d[i] = h
        out[i] = (mode.field(pol, pos + d).E - mode.field(pol, pos - d).E) / (2 * h)
    return out


def test_polarization_basis_orthonormal():
    H, V, sp, sm = POLS[:4]
    for p in POLS:
        assert abs(np.vdot(p.vector, p.vector) - 1) < 1e-12
    assert abs(np.vdot(H.vector, V.vector)) < 1e-12
    assert abs(np.vdot(sp.vector, sm.vector)) < 1e-12
    assert sp.helicity() == 1 and sm.helicity() == -1 and H.helicity() is None


@pytest.mark.parametrize("p", [0, 1, 2])
@pytest.mark.parametrize("l", [-3, -2, -1, 0, 1, 2, 3])
def test_power_normalization_quadrature(p, l):
    mode = LGMode(p=p, l=l, waist_w0=W0, power_P=3.5)
    pol = PolarizationState.H()

    def integrand(r, phi):
        pos = np.array([r * math.cos(phi), r * math.sin(phi), 0.0])
        return r * float(mode.field(pol, pos).transverse_intensity)

    total, _ = integrate.dblquad(integrand, 0, 2 * math.pi, 0, 6 * W0, epsabs=1e-12, epsrel=1e-10)
    assert total == pytest.approx(mode.power_P, rel=1e-6)


@pytest.mark.parametrize("p,l", [(0, 0), (0, 1), (0, -2), (1, 1), (2, -3), (1, 0)])
@pytest.mark.parametrize("pol", POLS)
def test_gradient_matches_finite_differences(p, l, pol):
    mode = LGMode(p=p, l=l, waist_w0=W0)
    for pos in ([0.3, -0.8, 0.05], [1.9, 0.4, -0.2], [0.0, 0.0, 0.0], [-2.5, 3.1, 0.4]):
        G = mode.gradient(pol, pos).G
        fd = central_differences(mode, pol, pos, 1e-4 * W0)
        norm = np.max(np.abs(G))
        mask = np.abs(G) > 1e-12 * norm
        assert np.all(np.abs(fd - G)[mask] <= 1e-6 * np.abs(G)[mask] + 1e-9 * norm)


def test_gaussian_peak_amplitude():
    P = 2.0
    mode = LGMode(p=0, l=0, waist_w0=W0, power_P=P)
    for pol in POLS:
        E = mode.field(pol, [0, 0, 0]).E
        assert np.linalg.norm(E) == pytest.approx(math.sqrt(2 * P / (math.pi * W0**2)), rel=1e-12)


def test_gaussian_gradient_at_peak_is_longitudinal():
    mode = LGMode(p=0, l=0, waist_w0=W0)
    for pol in POLS:
        g = mode.gradient(pol, [0, 0, 0])
        assert np.max(np.abs(g.G[:2, :2])) < 1e-15
        assert np.max(np.abs(g.first_order()[:2, :])) < 1e-15
        assert np.allclose(g.G[2], 1j * mode.k * g.E, atol=0)
        # the surviving d_x E_z is the envelope curvature, O(1/(k w0)^2) of d_z E
        ratio = np.max(np.abs(g.G[:2, 2])) / np.max(np.abs(g.G[2, :2]))
        assert ratio == pytest.approx(2 / (mode.k * W0) ** 2, rel=1e-12)


def test_dark_penumbra_and_first_derivative():
    mode = LGMode(p=0, l=1, waist_w0=W0)
    C = mode.amplitude
    pol = PolarizationState.H()
    for q in POLS:
        assert np.max(np.abs(mode.field(q, [0, 0, 0]).E[:2])) == 0
    # co-rotating sigma+ leaves no longitudinal field on axis either; sigma- does not
    assert np.max(np.abs(mode.field(PolarizationState.sigma_plus(), [0, 0, 0]).E)) < 1e-18
    assert abs(mode.field(PolarizationState.sigma_minus(), [0, 0, 0]).E[2]) > 1e-3
    G = mode.gradient(pol, [0, 0, 0]).G
    ux, uy = G[0, 0], G[1, 0]
    assert ux == pytest.approx(math.sqrt(2) * C / W0, rel=1e-12)
    assert uy / 1j == pytest.approx(math.sqrt(2) * C / W0, rel=1e-12)
    assert np.max(np.abs(G[2, :2])) == 0


def test_ring_maximum_against_1d_maximizer():
    mode = LGMode(p=0, l=1, waist_w0=W0, power_P=1.0)
    pol = PolarizationState.H()
    # independent oracle: maximize the radial profile sqrt(2) (r/w0) exp(-r^2/w0^2)
    res = optimize.minimize_scalar(lambda r: -math.sqrt(2) * r / W0 * math.exp(-r * r / W0**2),
                                   bounds=(0, 3 * W0), method="bounded", options={"xatol": 1e-12})
    assert res.x == pytest.approx(W0 / math.sqrt(2), rel=1e-6)
    peak = -res.fun * mode.amplitude
    E = lg_field(mode, pol, [W0 / math.sqrt(2), 0, 0]).E
    assert abs(E[0]) == pytest.approx(peak, rel=1e-9)
    rs = np.linspace(0, 3 * W0, 2001)
    profile = np.abs(mode.field(pol, np.stack([rs, 0 * rs, 0 * rs], -1)).E[:, 0])
    assert profile.max() <= abs(E[0]) * (1 + 1e-12)


@pytest.mark.parametrize("l", [2, -2])
def test_double_charge_vortex_center(l):
    mode = LGMode(p=0, l=l, waist_w0=W0)
    for pol in POLS:
        g = mode.gradient(pol, [0, 0, 0])
        assert np.max(np.abs(g.E)) == 0
        assert np.max(np.abs(g.first_order())) == 0
        assert np.max(np.abs(g.G[:, :2])) == 0


def test_azimuthal_phase_l_plus_one():
    mode = LGMode(p=0, l=1, waist_w0=W0)
    pol = PolarizationState.H()
    for r in (0.3, 1.0, 2.2):
        a = mode.field(pol, [r, 0, 0]).E[0]
        b = mode.field(pol, [0, r, 0]).E[0]
        assert np.angle(a * np.conj(b)) == pytest.approx(-math.pi / 2, abs=1e-12)


@pytest.mark.parametrize("l", range(-4, 5))
def test_origin_regular_and_continuous(l):
    mode = LGMode(p=1, l=l, waist_w0=W0)
    pol = PolarizationState.sigma_plus()
    at0 = mode.gradient(pol, [0, 0, 0])
    near = mode.gradient(pol, [1e-9, -1e-9, 0])
    assert np.all(np.isfinite(at0.G)) and np.all(np.isfinite(at0.E))
    assert np.max(np.abs(near.E - at0.E)) < 1e-6
    assert np.max(np.abs(near.G - at0.G)) < 1e-6


@settings(max_examples=60, deadline=None)
@given(l=st.integers(-3, 3), p=st.integers(0, 2),
       x=st.floats(-5, 5), y=st.floats(-5, 5), z=st.floats(-1, 1))
def test_mirror_symmetry_transverse_field(l, p, x, y, z):
    pos = np.array([x, y, 0.0])
    plus = LGMode(p=p, l=l, waist_w0=W0).field(PolarizationState.sigma_plus(), pos).E
    minus = LGMode(p=p, l=-l, waist_w0=W0).field(PolarizationState.sigma_minus(), pos).E
    # (l, sigma+) -> (-l, sigma-) conjugates the transverse field; E_z picks up a sign
    assert np.allclose(minus[:2], np.conj(plus[:2]), atol=1e-14)
    assert np.allclose(minus[2], -np.conj(plus[2]), atol=1e-14)


@settings(max_examples=60, deadline=None)
@given(l=st.integers(-3, 3), x=st.floats(-5, 5), y=st.floats(-5, 5))
def test_mirror_symmetry_reflection(l, x, y):
    plus = LGMode(p=0, l=l, waist_w0=W0).field(PolarizationState.sigma_plus(), [x, y, 0]).E
    minus = LGMode(p=0, l=-l, waist_w0=W0).field(PolarizationState.sigma_minus(), [x, -y, 0]).E
    flip = np.array([1, -1, 1])
    assert np.allclose(flip * minus, plus, atol=1e-14)


@settings(max_examples=80, deadline=None)
@given(l=st.integers(-3, 3), p=st.integers(0, 2),
       x=st.floats(-6, 6), y=st.floats(-6, 6), z=st.floats(-2, 2),
       a=st.floats(0, 2 * math.pi))
def test_transversality(l, p, x, y, z, a):
    pol = PolarizationState((math.cos(a), 1j * math.sin(a)))
    mode = LGMode(p=p, l=l, waist_w0=W0)
    g = mode.gradient(pol, [x, y, z])
    div_t = g.G[0, 0] + g.G[1, 1]
    scale = np.max(np.abs(g.G)) / mode.k + 1e-300
    assert abs(g.E[2] - 1j / mode.k * div_t) <= 1e-9 * scale


@settings(max_examples=40, deadline=None)
@given(l=st.integers(-3, 3), x=st.floats(-4, 4), y=st.floats(-4, 4))
def test_symmetric_traceless_part(l, x, y):
    g = LGMode(p=0, l=l, waist_w0=W0).gradient(PolarizationState((0.8, 0.6j)), [x, y, 0.1])
    S = g.symmetric_traceless(first_order=False)
    scale = np.max(np.abs(S)) + 1e-300
    assert np.max(np.abs(S - S.T)) <= 1e-12 * scale
    assert abs(np.trace(S)) <= 1e-12 * scale


def test_vectorized_evaluation_matches_pointwise():
    mode = LGMode(p=1, l=-2, waist_w0=W0)
    pol = PolarizationState.sigma_minus()
    pts = np.random.default_rng(0).normal(size=(4, 5, 3))
    G = lg_gradient_tensor(mode, pol, pts).G
    assert G.shape == (4, 5, 3, 3)
    assert np.allclose(G[2, 3], lg_gradient_tensor(mode, pol, pts[2, 3]).G, rtol=0, atol=1e-15)


def test_mixture_identity_and_zero_weight():
    a = LGMode(p=0, l=1, waist_w0=W0)
    b = LGMode(p=0, l=-1, waist_w0=W0)
    pol = PolarizationState.H()
    pos = [0.7, -0.4, 0.1]
    assert np.allclose(mode_mixture([(a, 1)]).field(pol, pos).E, a.field(pol, pos).E, atol=0)
    assert np.allclose(mode_mixture([(a, 1), (b, 0)]).gradient(pol, pos).G,
                       a.gradient(pol, pos).G, atol=0)


def test_mixture_lobe_pattern():
    a = LGMode(p=0, l=1, waist_w0=W0)
    b = LGMode(p=0, l=-1, waist_w0=W0)
    pol = PolarizationState.H()
    mix = mode_mixture([(a, 1), (b, 1)])
    rng = np.random.default_rng(3)
    for x, y in rng.normal(scale=2, size=(20, 2)):
        E = mix.field(pol, [x, y, 0]).E
        direct = a.field(pol, [x, y, 0]).E + b.field(pol, [x, y, 0]).E
        assert np.allclose(E, direct, atol=1e-15)
        # (x+iy) + (x-iy) = 2x
        expected = 2 * math.sqrt(2) * a.amplitude * x / W0 * math.exp(-(x * x + y * y) / W0**2)
        assert E[0] == pytest.approx(expected, abs=1e-14)
    assert abs(mix.field(pol, [0, 1.3, 0]).E[0]) < 1e-15


def test_mixture_errors():
    a = LGMode(p=0, l=1, waist_w0=W0)
    with pytest.raises(DomainError):
        mode_mixture([(a, 1), (LGMode(p=0, l=0, waist_w0=W0, wavelength_lambda=397.0), 1)])
    with pytest.raises(DomainError):
        mode_mixture([])
    with pytest.raises(DomainError):
        mode_mixture([(a, 0)])


@pytest.mark.parametrize("bad", [[math.nan, 0, 0], [0, math.inf, 0], [0, 0, -math.inf]])
def test_non_finite_position_rejected(bad):
    mode = LGMode(p=0, l=1)
    with pytest.raises(DomainError):
        mode.field(PolarizationState.H(), bad)
    with pytest.raises(DomainError):
        mode.gradient(PolarizationState.H(), bad)


@pytest.mark.parametrize("kwargs", [dict(waist_w0=0), dict(wavelength_lambda=-1), dict(power_P=-1),
                                    dict(p=-1)])
def test_invalid_mode_parameters(kwargs):
    args = dict(p=0, l=0)
    args.update(kwargs)
    with pytest.raises(DomainError):
        LGMode(**args)
