import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vortex_ion import DomainError, InsufficientDataError
from vortex_ion.dynamics import (GROUND, Segment, TwoLevelState, evolve, fit_frequency, make_rng,
                                 rabi_probability, rabi_trace, ramsey_trace, run_sequence,
                                 simulate_shots, spawn_streams)


def pulse_time(f_kHz, angle):
    return angle / (2 * math.pi * f_kHz * 1e-3)


def test_pi_and_half_pi_pulses():
    f = 15.67
    assert evolve(GROUND, Segment("resonant_pulse", pulse_time(f, math.pi), f)).P_e == pytest.approx(
        1.0, abs=1e-14)
    assert evolve(GROUND, Segment("resonant_pulse", pulse_time(f, math.pi / 2), f)).P_e == \
        pytest.approx(0.5, abs=1e-14)


def test_detuning_equal_to_rabi_frequency():
    f = 10.0
    t = pulse_time(f * math.sqrt(2), math.pi)
    assert evolve(GROUND, Segment("resonant_pulse", t, f, detuning=f)).P_e == pytest.approx(0.5, abs=1e-14)
    ts = np.linspace(0, 400, 4001)
    assert rabi_trace(f, ts, detuning=f).max() <= 0.5 + 1e-14


@settings(max_examples=50, deadline=None)
@given(f=st.floats(0.1, 200), d=st.floats(-100, 100), t=st.floats(0, 500))
def test_closed_form_agrees_with_propagator(f, d, t):
    seg = Segment("resonant_pulse", t, f, d)
    assert evolve(GROUND, seg).P_e == pytest.approx(float(rabi_probability(f, d, t)), abs=1e-12)


def test_unitarity_long_sequence():
    rng = np.random.default_rng(0)
    state = GROUND
    kinds = ("resonant_pulse", "offresonant_exposure", "wait")
    for i in range(10_000):
        seg = Segment(kinds[i % 3], float(rng.uniform(0, 50)), omega=float(rng.uniform(0, 50)),
                      detuning=float(rng.normal(scale=10)), phase=float(rng.uniform(0, 6.3)),
                      shift=float(rng.normal(scale=5)))
        state = evolve(state, seg)
    assert abs(state.norm - 1) < 1e-12


@settings(max_examples=50, deadline=None)
@given(kind=st.sampled_from(["resonant_pulse", "offresonant_exposure", "wait"]),
       f=st.floats(0, 80), d=st.floats(-40, 40), ph=st.floats(0, 6.3), s=st.floats(-20, 20),
       t1=st.floats(0, 200), t2=st.floats(0, 200))
def test_composition(kind, f, d, ph, s, t1, t2):
    start = TwoLevelState(0.6, 0.8j)
    seg = lambda t: Segment(kind, t, f, d, ph, s)
    a = evolve(evolve(start, seg(t1)), seg(t2))
    b = evolve(start, seg(t1 + t2))
    assert abs(a.c_g - b.c_g) < 1e-12 and abs(a.c_e - b.c_e) < 1e-12


def test_exposure_phase_on_excited_amplitude():
    start = TwoLevelState(1 / math.sqrt(2), 1 / math.sqrt(2))
    shift, t = 1.54, 100.0
    out = evolve(start, Segment("offresonant_exposure", t, shift=shift))
    rel = out.c_e / out.c_g
    assert np.angle(rel) == pytest.approx(-2 * math.pi * shift * t * 1e-3, abs=1e-12)


def test_wait_is_identity_without_detuning():
    start = TwoLevelState(0.6, 0.8j)
    out = evolve(start, Segment("wait", 123.0, omega=50.0))
    assert out == TwoLevelState(0.6 + 0j, 0.8j)


def test_invalid_segments():
    with pytest.raises(DomainError):
        Segment("pulse", 1.0)
    with pytest.raises(DomainError):
        Segment("wait", -1.0)


def test_ramsey_zero_shift_is_bright():
    assert np.allclose(ramsey_trace(0.0, np.linspace(0, 1000, 11)), 1.0, atol=1e-14)


def test_ramsey_ideal_form_and_first_minimum():
    ts = np.linspace(0, 1300, 1301)
    P = ramsey_trace(1.54, ts)
    assert np.allclose(P, (1 + np.cos(2 * math.pi * 1.54e-3 * ts)) / 2, atol=1e-12)
    t_min = ts[np.argmin(P[ts < 500])]
    assert t_min == pytest.approx(1 / (2 * 1.54e-3), abs=1.0)
    assert abs(t_min - 325) < 1.0


def test_ramsey_rejects_bad_input():
    with pytest.raises(DomainError):
        ramsey_trace(1.0, [-1.0])
    with pytest.raises(DomainError):
        ramsey_trace(1.0, [1.0], pi2_omega=0.0)


def test_fit_noiseless_ramsey():
    ts = np.arange(0, 1300.0, 10.0)
    fit = fit_frequency(ts, ramsey_trace(1.54, ts))
    assert fit.frequency == pytest.approx(1.54, rel=1e-9)
    assert fit.amplitude == pytest.approx(0.5, rel=1e-9)
    assert fit.offset == pytest.approx(0.5, rel=1e-9)
    freq, amp, phase, offset, stderr = fit
    assert freq == fit.frequency and stderr >= 0


def test_fit_rabi_reference_grid():
    ts = np.arange(0, 200.0 + 1e-9, 5.0)
    fit = fit_frequency(ts, rabi_trace(15.67, ts))
    assert fit.frequency == pytest.approx(15.67, rel=1e-3)
    assert abs(fit.frequency - 15.67) <= max(fit.stderr, 1e-9 * 15.67)


@pytest.mark.parametrize("delta", [0.1, 0.5, 1.54, 5.0, 13.0, 27.0, 50.0])
def test_ramsey_fit_linear_in_shift(delta):
    span = max(1300.0, 3 / delta * 1e3)
    ts = np.linspace(0, span, 400)
    assert fit_frequency(ts, ramsey_trace(delta, ts)).frequency == pytest.approx(delta, rel=1e-6)


def test_fit_rejects_bad_records():
    ts = np.arange(0, 200.0, 5.0)
    with pytest.raises(InsufficientDataError):
        fit_frequency(ts, np.full_like(ts, 0.3))
    with pytest.raises(InsufficientDataError):
        fit_frequency(ts[:5], rabi_trace(15.67, ts[:5]))
    short = np.linspace(0, 20, 30)
    with pytest.raises(InsufficientDataError):
        fit_frequency(short, rabi_trace(15.67, short))
    with pytest.raises(DomainError):
        fit_frequency(ts, ts[:-1])


def test_shot_noise_fit_median_within_two_percent():
    ts = np.arange(0, 200.0 + 1e-9, 5.0)
    P = rabi_trace(15.67, ts)
    fits = []
    for rng in spawn_streams(7, 100):
        counts = simulate_shots(P, 200, rng=rng)
        fits.append(fit_frequency(ts, counts / 200).frequency)
    assert abs(np.median(fits) / 15.67 - 1) < 0.02


def test_shot_extremes_and_statistics():
    assert np.all(simulate_shots(np.zeros(50), 200, seed=1) == 0)
    assert np.all(simulate_shots(np.ones(50), 200, seed=1) == 200)
    counts = simulate_shots(np.full(10_000, 0.5), 200, seed=42)
    frac = counts / 200
    se = 0.5 / math.sqrt(200) / math.sqrt(frac.size)
    assert abs(frac.mean() - 0.5) < 3 * se
    assert frac.std() == pytest.approx(0.5 / math.sqrt(200), rel=0.05)


def test_shots_reproducible_and_seed_required():
    P = np.linspace(0, 1, 17)
    assert np.array_equal(simulate_shots(P, 200, seed=5), simulate_shots(P, 200, seed=5))
    assert np.array_equal(simulate_shots(P, 200, seed=5), simulate_shots(P, 200, rng=make_rng(5)))
    with pytest.raises(DomainError):
        simulate_shots(P, 200)
    with pytest.raises(DomainError):
        make_rng(None)
    with pytest.raises(DomainError):
        spawn_streams(None, 3)


@pytest.mark.parametrize("p", [-0.01, 1.01, math.nan])
def test_shots_reject_bad_probabilities(p):
    with pytest.raises(DomainError):
        simulate_shots([0.5, p], 200, seed=1)


def test_shots_reject_bad_count():
    with pytest.raises(DomainError):
        simulate_shots([0.5], 0, seed=1)
    with pytest.raises(DomainError):
        simulate_shots([0.5], 2.5, seed=1)


def test_spawned_streams_are_independent():
    a, b = spawn_streams(9, 2)
    assert not np.array_equal(a.integers(0, 2**32, 8), b.integers(0, 2**32, 8))
    again = spawn_streams(9, 2)
    assert np.array_equal(again[1].integers(0, 2**32, 8), spawn_streams(9, 2)[1].integers(0, 2**32, 8))


def test_run_sequence_matches_manual_evolution():
    segs = [Segment("resonant_pulse", 5.0, 50.0), Segment("offresonant_exposure", 100.0, shift=2.0),
            Segment("resonant_pulse", 5.0, 50.0, phase=0.3)]
    s = GROUND
    for seg in segs:
        s = evolve(s, seg)
    assert run_sequence(segs) == s
