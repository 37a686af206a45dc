"""
Command-line front end.

    vortex-ion table  [--config cfg.json] [--out path] [--format csv|json]
    vortex-ion scan | rabi | ramsey | stark  (same flags, plus --seed)
    vortex-ion selftest

Exit codes: 0 success, 1 configuration error, 2 numerical-domain error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import coupling, dynamics, stark
from .config import build_config, config_hash, load_config
from .coupling import ExperimentGeometry, ZeemanTransition
from .errors import ConfigError, DomainError, InsufficientDataError
from .lgbeam import LGMode, PolarizationState
from .results import ResultTable


def polarization(value) -> PolarizationState:
    if isinstance(value, str):
        return PolarizationState.from_name(value)
    (xr, xi), (yr, yi) = value
    return PolarizationState((complex(xr, xi), complex(yr, yi)))


def beam_from(cfg) -> LGMode:
    b = cfg["beam"]
    return LGMode(p=b["p"], l=b["l"], waist_w0=b["waist_um"], wavelength_lambda=b["wavelength_nm"],
                  power_P=b["power_uW"])


def geometry_from(cfg, offset=None) -> ExperimentGeometry:
    g = cfg["geometry"]
    return ExperimentGeometry(alpha=math.radians(g["alpha_deg"]),
                              ion_offset=tuple(offset if offset is not None else g["ion_offset_um"]),
                              B_magnitude=g["B_mT"] * 1e-3, phi=math.radians(g["phi_deg"]))


def transition_from(cfg) -> ZeemanTransition:
    t = cfg["transition"]
    return ZeemanTransition.from_doubled(t["m2_S"], t["m2_D"])


def time_grid(start, stop, step) -> np.ndarray:
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(n)


def cmd_table(cfg) -> ResultTable:
    b = cfg["beam"]
    rows = coupling.selection_rule_table(b["waist_um"], b["wavelength_nm"], ls=cfg["table"]["l_values"])
    data = [[r["m_S"], r["m_D"], r["delta_m"], r["sigma"], r["l"], r["omega"]] for r in rows]
    return ResultTable(
        command="table",
        columns=["m_S", "m_D", "delta_m", "sigma", "l", "omega_rel"],
        units=["", "", "", "", "", "rel/sqrt(uW)"],
        rows=data,
        config_hash=config_hash(cfg),
        meta={"alpha_deg": 0.0, "waist_um": b["waist_um"], "wavelength_nm": b["wavelength_nm"],
              "gaussian_vortex_ratio": coupling.gaussian_vortex_ratio(b["waist_um"], b["wavelength_nm"])},
    )


def cmd_scan(cfg) -> ResultTable:
    s = cfg["scan"]
    mode = beam_from(cfg)
    geom = geometry_from(cfg)
    tr = transition_from(cfg)
    offsets = np.linspace(s["start_um"], s["stop_um"], s["steps"])
    if s["channels"] == "ideal":
        ch_V, ch_H = "longitudinal", "transverse"
    else:
        ch_V = ch_H = "full"
    V = coupling.position_scan(mode, PolarizationState.V(), geom, tr, s["axis"], offsets, channel=ch_V)
    H = coupling.position_scan(mode, PolarizationState.H(), geom, tr, s["axis"], offsets, channel=ch_H)
    rows = [[o, v, h] for (o, v), (_, h) in zip(V, H)]
    return ResultTable(
        command="scan",
        columns=["offset_um", "omega_V", "omega_H"],
        units=["um", "rel/sqrt(uW)", "rel/sqrt(uW)"],
        rows=rows,
        config_hash=config_hash(cfg),
        meta={"mode": f"LG_{mode.p}^{mode.l}", "channels": s["channels"],
              "alpha_deg": cfg["geometry"]["alpha_deg"], "delta_m": tr.delta_m},
    )


def _noisy_columns(cfg, probs):
    seq = cfg["sequence"]
    if not seq["noise"]:
        return None
    if cfg["seed"] is None:
        raise ConfigError("sequence.noise requires a seed (config 'seed' or --seed)")
    counts = dynamics.simulate_shots(probs, seq["n_shots"], seed=cfg["seed"])
    return counts, counts / seq["n_shots"]


def _trace_table(command, cfg, times, probs, fit_key) -> ResultTable:
    noisy = _noisy_columns(cfg, probs)
    columns, units = ["t_us", "P_e"], ["us", ""]
    if noisy is None:
        rows = [[t, p] for t, p in zip(times, probs)]
        fit_values = probs
    else:
        counts, frac = noisy
        columns += ["counts", "P_e_shots"]
        units += ["", ""]
        rows = [[t, p, int(c), f] for t, p, c, f in zip(times, probs, counts, frac)]
        fit_values = frac
    fit = dynamics.fit_frequency(times, fit_values)
    meta = {f"fit_{fit_key}_kHz": fit.frequency, f"fit_{fit_key}_stderr_kHz": fit.stderr,
            "n_shots": cfg["sequence"]["n_shots"] if noisy is not None else 0}
    return ResultTable(command=command, columns=columns, units=units, rows=rows,
                       config_hash=config_hash(cfg), meta=meta)


def cmd_rabi(cfg) -> ResultTable:
    seq = cfg["sequence"]
    times = time_grid(seq["t_start_us"], seq["t_stop_us"], seq["t_step_us"])
    probs = dynamics.rabi_trace(seq["omega_kHz"], times, seq["detuning_kHz"])
    return _trace_table("rabi", cfg, times, probs, "omega")


def cmd_ramsey(cfg) -> ResultTable:
    seq = cfg["sequence"]
    times = time_grid(0.0, seq["ramsey_t_stop_us"], seq["ramsey_t_step_us"])
    probs = dynamics.ramsey_trace(seq["delta_S_kHz"], times, seq["pi2_omega_kHz"],
                                  seq["pi2_detuning_kHz"])
    table = _trace_table("ramsey", cfg, times, probs, "delta_S")
    table.meta["injected_delta_S_kHz"] = seq["delta_S_kHz"]
    return table


_STARK_COLUMNS = ["case", "delta_S_kHz", "P_delta_mW", "omega_kHz", "P_omega_uW", "detuning_MHz",
                  "delta_S_prime_kHz", "delta_S_prime_per_mW", "xi"]
_STARK_UNITS = ["", "2pi kHz", "mW", "2pi kHz", "uW", "2pi MHz", "2pi kHz", "2pi kHz/mW",
                "(2pi kHz/mW)/(2pi kHz/sqrt(uW))"]


def simulated_budgets(cfg) -> dict:
    """Stark budgets for cases A and B from the beam model and a dipolar coefficient."""
    sim = cfg["stark"]["simulate"]
    mode = beam_from(cfg)
    tr = transition_from(cfg)
    sigma = cfg["geometry"]["sigma_thermal_nm"] * 1e-3
    detuning = stark.Frequency.MHz(cfg["stark"]["detuning_MHz"])
    P_delta = stark.Power.mW(sim["P_delta_mW"])
    P_omega = stark.Power.uW(sim["P_omega_uW"])
    budgets = {}
    for name in ("A", "B"):
        case = sim[name]
        pos = case["position_um"]
        if pos is None:
            r_ring = mode.waist_w0 * math.sqrt(abs(mode.l) / 2)
            pos = [r_ring, 0.0, 0.0]
        pol = polarization(case["polarization"])
        geom = geometry_from(cfg, offset=pos)
        rel = coupling.thermal_average(mode, pol, geom, tr, sigma)
        omega = stark.Frequency.kHz(sim["omega_scale"] * rel * math.sqrt(P_omega.in_uW))
        dipolar = stark.simulate_dipolar_shift(mode.with_power(P_delta.in_uW), pol, pos,
                                               sim["kappa"], sigma_thermal=sigma)
        quad = stark.quadrupolar_shift(omega, detuning) * (P_delta / P_omega)
        budgets[name] = stark.StarkBudget(dipolar + quad, P_delta, omega, P_omega, detuning)
    return budgets


def cmd_stark(cfg) -> ResultTable:
    st = cfg["stark"]
    if st["mode"] == "reproduce":
        budgets = {name: stark.budget_from_numbers(detuning_MHz=st["detuning_MHz"], **st["cases"][name])
                   for name in ("A", "B")}
    else:
        budgets = simulated_budgets(cfg)
    rows = []
    for name, b in budgets.items():
        omega_zero = b.omega.kHz_value == 0
        xi = 0.0 if omega_zero else b.xi
        rows.append([name, b.delta_S.in_kHz, b.P_delta.in_mW, b.omega.in_kHz, b.P_omega.in_uW,
                     b.detuning_Delta.in_MHz, b.delta_S_prime.in_kHz, b.normalized_shift, xi])
    meta = {"mode": st["mode"]}
    a, bb = budgets["A"], budgets["B"]
    if bb.normalized_shift != 0 and bb.omega.kHz_value != 0 and a.omega.kHz_value != 0 and bb.xi != 0:
        ratios = stark.compare_cases(a, bb)
        meta["ratio_normalized_shift"] = ratios["normalized_shift_ratio"]
        meta["ratio_xi"] = ratios["xi_ratio"]
    return ResultTable(command="stark", columns=_STARK_COLUMNS, units=_STARK_UNITS, rows=rows,
                       config_hash=config_hash(cfg), meta=meta)


COMMANDS = {
    "table": cmd_table,
    "scan": cmd_scan,
    "rabi": cmd_rabi,
    "ramsey": cmd_ramsey,
    "stark": cmd_stark,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vortex-ion",
        description="Quadrupole coupling of Laguerre-Gaussian beams to a trapped ion.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in list(COMMANDS) + ["selftest"]:
        p = sub.add_parser(name)
        if name != "selftest":
            p.add_argument("--config", type=Path, help="JSON run configuration")
            p.add_argument("--out", type=Path, help="output file (default: stdout)")
            p.add_argument("--format", choices=("csv", "json"), default="csv")
            p.add_argument("--seed", type=int, help="RNG seed, overrides the config")
    return parser


def run(command: str, cfg: dict) -> ResultTable:
    return COMMANDS[command](cfg)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "selftest":
        from .selftest import run_selftest
        return 0 if run_selftest() else 2
    try:
        cfg = load_config(args.config) if args.config else build_config({})
        if args.seed is not None:
            if not 0 <= args.seed < 2**64:
                raise ConfigError("--seed must be an unsigned 64-bit integer")
            cfg = build_config({**cfg, "seed": args.seed})
        table = run(args.command, cfg)
        text = table.render(args.format)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (DomainError, InsufficientDataError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
