"""Fast invariant checks behind ``vortex-ion selftest``."""

from __future__ import annotations

import math

import numpy as np

from . import angular, coupling, dynamics, stark
from .lgbeam import LGMode, PolarizationState


def _fd_agreement():
    mode = LGMode(p=1, l=1, waist_w0=2.7)
    pol = PolarizationState((0.6, 0.8j))
    pos = np.array([0.4, -0.7, 0.2])
    G = mode.gradient(pol, pos).G
    h = 1e-4 * mode.waist_w0
    fd = np.empty_like(G)
    for i in range(3):
        dp = np.zeros(3)
        dp[i] = h
        fd[i] = (mode.field(pol, pos + dp).E - mode.field(pol, pos - dp).E) / (2 * h)
    return float(np.max(np.abs(fd - G)) / np.max(np.abs(G)))


def _threej_orthogonality():
    worst = 0.0
    for tj1 in range(0, 5):
        for tj2 in range(0, 5):
            for tj3 in range(abs(tj1 - tj2), tj1 + tj2 + 1, 2):
                for tm3 in range(-tj3, tj3 + 1, 2):
                    acc = 0.0
                    for tm1 in range(-tj1, tj1 + 1, 2):
                        tm2 = -tm3 - tm1
                        if abs(tm2) <= tj2:
                            acc += angular.wigner3j(tj1 / 2, tj2 / 2, tj3 / 2, tm1 / 2, tm2 / 2, tm3 / 2) ** 2
                    worst = max(worst, abs((tj3 + 1) * acc - 1))
    return worst


def _d_orthogonality():
    return max(float(np.max(np.abs(d @ d.T - np.eye(len(d)))))
               for d in (angular.wigner_d(j / 2, 0.7) for j in range(0, 6)))


def _equivariance():
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(5):
        S = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        beta = rng.uniform(0, np.pi)
        R = angular.rotation_y(beta)
        lhs = angular.cartesian_to_spherical2(R @ S @ R.T).components
        rhs = angular.wigner_d(2, beta) @ angular.cartesian_to_spherical2(S).components
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def _selection_rules():
    rows = coupling.selection_rule_table(2.7, 729.0)
    top = max(r["omega"] for r in rows)
    return max(r["omega"] for r in rows if r["delta_m"] != r["sigma"] + r["l"]) / top


def _unitarity():
    state = dynamics.GROUND
    seg = dynamics.Segment("resonant_pulse", 0.37, omega=15.67, detuning=3.1, phase=0.4)
    for _ in range(10_000):
        state = dynamics.evolve(state, seg)
    return abs(state.norm - 1)


def _ramsey_roundtrip():
    t = np.arange(0, 1300.0, 10.0)
    fit = dynamics.fit_frequency(t, dynamics.ramsey_trace(1.54, t))
    return abs(fit.frequency - 1.54) / 1.54


def _stark_ratios():
    A = stark.budget_from_numbers(detuning_MHz=25.0, **stark.REFERENCE_CASES["A"])
    B = stark.budget_from_numbers(detuning_MHz=25.0, **stark.REFERENCE_CASES["B"])
    r = stark.compare_cases(A, B)
    return max(abs(r["normalized_shift_ratio"] - 0.0070) / 0.0025, abs(r["xi_ratio"] - 0.025) / 0.009)


CHECKS = [
    ("gradient tensor vs finite differences", _fd_agreement, 1e-6),
    ("3-j orthogonality", _threej_orthogonality, 1e-12),
    ("Wigner-d orthogonality", _d_orthogonality, 1e-12),
    ("rank-2 rotation equivariance", _equivariance, 1e-10),
    ("axial selection rules", _selection_rules, 1e-12),
    ("two-level unitarity (1e4 segments)", _unitarity, 1e-12),
    ("Ramsey fit round trip", _ramsey_roundtrip, 1e-9),
    ("Stark A/B ratios (in units of stated uncertainty)", _stark_ratios, 1.0),
]


def run_selftest(out=print) -> bool:
    ok = True
    for name, check, tol in CHECKS:
        value = check()
        passed = math.isfinite(value) and value <= tol
        ok &= passed
        out(f"{'PASS' if passed else 'FAIL'}  {name}: {value:.3g} (tol {tol:g})")
    return ok
