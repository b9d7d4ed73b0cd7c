"""Command-line front end.

Five subcommands drive the library end to end from one TOML scenario:

* ``paper-numbers``  — canned reproduction of the quartz worked example
* ``exact-checks``   — operator-algebra / QND / convergence check suite
* ``montecarlo``     — shot-noise Monte Carlo of the homodyne readout
* ``top-dynamics``   — torque-free precession (or ``--align`` preparation)
* ``snr-scan``       — SNR versus probe photon number

Every command writes deterministic CSV files (and figures unless
``--no-figures``) into the output directory.  Exit codes: 0 success,
2 configuration errors, 3 physics/contract violations, 4 resource limits.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from pathlib import Path

import numpy as np

from . import (gaussian_measurement as gm, hilbert, jones_optics, plotting,
               rigid_top, scenario as scenario_mod, tableio)
from .errors import ConfigError, ContractError, ResourceLimitError, SpintopError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONTRACT = 3
EXIT_RESOURCE = 4

#: reference values from the published worked example (blank = none given)
_REFERENCES = {
    "mass_kg": 4.44e-14,
    "inertia_transverse_kg_m2": 4.44e-26,
    "spin_quanta": 2.6e9,
    "half_retardance": 0.094,
    "signal_coeff_per_photon": 5.1e-6,
    "qp_coeff_per_sqrt_photon": 0.27,
    "pp_coeff_per_sqrt_photon": -1.4,
    "snr_at_scenario_photons": 1.0,
    "photons_for_unit_snr": 7.9e10,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spintop",
        description="Quantum-noise-limited readout of a spinning birefringent "
                    "micro-object: scenario-driven simulations and reports.",
    )
    parser.add_argument("--config", type=Path, default=None,
                        help="TOML scenario file (default: built-in quartz scenario)")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the run seed")
    parser.add_argument("--out", type=Path, default=None,
                        help="output directory (default: run.out_dir from the scenario)")
    parser.add_argument("--override", action="append", default=[],
                        metavar="SECTION.KEY=VALUE",
                        help="override one scenario value (repeatable)")
    parser.add_argument("--no-figures", action="store_true",
                        help="skip figure rendering, emit CSV only")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("paper-numbers",
                   help="reproduce the worked-example numbers with references")

    sub.add_parser("exact-checks",
                   help="exact operator checks: algebra, QND, convergence, twisting")

    p_mc = sub.add_parser("montecarlo", help="shot-noise Monte Carlo readout")
    p_mc.add_argument("--shots", type=int, default=None,
                      help="number of shots (default: montecarlo.shots)")
    p_mc.add_argument("--fresh-object", action="store_true",
                      help="redraw the object each shot instead of probing one "
                           "persistent realization")

    p_td = sub.add_parser("top-dynamics", help="rigid-body trajectories")
    p_td.add_argument("--omega0", type=str, default=None, metavar="WX,WY,WZ",
                      help="initial body-frame angular velocity in rad/s "
                           "(default: scenario spin about X with a 0.1 rad/s tilt)")
    p_td.add_argument("--duration", type=float, default=None,
                      help="integration time in s (default: 10 precession periods)")
    p_td.add_argument("--dt", type=float, default=None,
                      help="time step in s (default: duration/20000)")
    p_td.add_argument("--align", action="store_true",
                      help="run the alignment/spin-up preparation stage instead")

    p_scan = sub.add_parser("snr-scan", help="SNR versus probe photon number")
    p_scan.add_argument("--n-min", type=float, default=1e9,
                        help="lowest photon number (default 1e9)")
    p_scan.add_argument("--n-max", type=float, default=1e12,
                        help="highest photon number (default 1e12)")
    p_scan.add_argument("--points", type=int, default=61,
                        help="number of logarithmic grid points (default 61)")
    return parser


def _load_scenario(args) -> scenario_mod.Scenario:
    if args.config is not None:
        scn = scenario_mod.load(args.config)
    else:
        scn = scenario_mod.paper_quartz()
    if args.override:
        scn = scenario_mod.apply_overrides(scn, args.override)
    updates = {}
    if args.seed is not None:
        updates["run.seed"] = args.seed
    if args.out is not None:
        updates["run.out_dir"] = str(args.out)
    if updates:
        scn = scenario_mod.apply_overrides(
            scn, [f"{k}={_toml_value(v)}" for k, v in updates.items()])
    return scn


def _toml_value(value) -> str:
    if isinstance(value, str):
        escaped = value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    return repr(value)


def _scaled_interaction(scn: scenario_mod.Scenario) -> rigid_top.InteractionParams:
    params = rigid_top.interaction_params(scn.slab, scn.wavelength, scn.top,
                                          window=scn.tau,
                                          axis_angle=scn.misalignment)
    if scn.signal_scale != 1.0:
        params = dataclasses.replace(
            params, coupling_per_quantum=params.coupling_per_quantum * scn.signal_scale)
    return params


# ---------------------------------------------------------------------------
# paper-numbers


def cmd_paper_numbers(scn: scenario_mod.Scenario, out: Path, figures: bool) -> None:
    inertia = rigid_top.ellipsoid_inertia(scn.top)
    quanta = rigid_top.spin_quanta(inertia, scn.top.spin_rate)
    _, theta = jones_optics.phase_parameters(scn.slab, scn.wavelength)
    params = _scaled_interaction(scn)
    obs = gm.output_observable(params, scn.photons)
    root_n = math.sqrt(scn.photons)
    values = {
        "mass_kg": inertia.mass,
        "inertia_transverse_kg_m2": inertia.about_x,
        "inertia_spin_kg_m2": inertia.about_y,
        "spin_quanta": quanta,
        "half_retardance": theta,
        "coupling_per_quantum": params.coupling_per_quantum,
        "twist_phase": params.twist_phase,
        "signal_coeff_per_photon": obs.signal_coeff / scn.photons,
        "qp_coeff_per_sqrt_photon": obs.qp_coeff / root_n,
        "pp_coeff_per_sqrt_photon": obs.pp_coeff / root_n,
        "snr_at_scenario_photons": gm.snr(scn.photons, quanta, theta),
        "photons_for_unit_snr": gm.solve_photon_number(1.0, quanta, theta),
    }
    rows = []
    bar_labels, bar_devs = [], []
    for name, value in values.items():
        ref = _REFERENCES.get(name)
        if ref is None:
            rows.append((name, value, "", ""))
        else:
            dev = abs(value - ref) / abs(ref)
            rows.append((name, value, ref, dev))
            bar_labels.append(name)
            bar_devs.append((value - ref) / abs(ref))
    tableio.write_rows(out / "paper_numbers.csv",
                       ("quantity", "value", "reference", "rel_deviation"), rows)
    print(f"wrote {out / 'paper_numbers.csv'}")
    if figures:
        plotting.paper_numbers_figure(bar_labels, bar_devs,
                                      out / "paper_numbers.png")
        print(f"wrote {out / 'paper_numbers.png'}")


# ---------------------------------------------------------------------------
# exact-checks


def _spectral(matrix: np.ndarray) -> float:
    return float(np.linalg.norm(matrix, 2))


def cmd_exact_checks(scn: scenario_mod.Scenario, out: Path, figures: bool) -> None:
    photon_space = hilbert.two_mode_fock_space(scn.n_max)
    s0, sx, sy, sz = hilbert.stokes_operators(photon_space)
    proj = hilbert.truncation_safe_projector(photon_space).matrix
    rows: list[tuple] = []

    pairs = (("xy", sx, sy, sz), ("yz", sy, sz, sx), ("zx", sz, sx, sy))
    for tag, a, b, c in pairs:
        resid = proj @ (a.matrix @ b.matrix - b.matrix @ a.matrix
                        - 2j * c.matrix) @ proj
        rows.append((f"stokes_commutator_{tag}_residual", _spectral(resid)))

    lx, ly, lz, _ = hilbert.spin_operators(scn.j)
    for tag, a, b, c in (("xy", lx, ly, lz), ("yz", ly, lz, lx),
                         ("zx", lz, lx, ly)):
        resid = a.matrix @ b.matrix - b.matrix @ a.matrix - 1j * c.matrix
        rows.append((f"spin_commutator_{tag}_residual", _spectral(resid)))

    # QND property over random interaction strengths
    rng = np.random.Generator(np.random.Philox(key=scn.seed))
    ly_lifted = hilbert.lift_spin(ly, photon_space)
    qnd_max = 0.0
    unitarity_max = 0.0
    trace_dev_max = 0.0
    dim = photon_space.dim * ly.matrix.shape[0]
    probe_h = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    probe_h = probe_h + probe_h.conj().T
    for _ in range(100):
        params = rigid_top.InteractionParams(
            half_retardance=float(rng.uniform(0.0, 0.3)),
            coupling_per_quantum=float(rng.uniform(0.0, 0.3)),
            twist_phase=float(rng.uniform(-0.3, 0.3)),
            axis_angle=0.0, window=1.0, quanta=2.0 * scn.j)
        evo = hilbert.evolution_operator(params, scn.n_max, scn.j,
                                         dim_cap=scn.dim_cap)
        qnd_max = max(qnd_max, hilbert.qnd_commutator_norm(evo, ly_lifted))
        unitarity_max = max(unitarity_max, evo.unitarity_defect())
        conj = evo.matrix.conj().T @ probe_h @ evo.matrix
        trace_dev_max = max(trace_dev_max,
                            abs(np.trace(conj) - np.trace(probe_h)))
    rows.append(("qnd_commutator_norm_max", qnd_max))
    rows.append(("evolution_unitarity_defect_max", unitarity_max))
    rows.append(("trace_preservation_deviation_max", trace_dev_max))

    thetas = (0.05, 0.025, 0.0125)
    order = hilbert.linearization_convergence_order(thetas, scn.j, scn.n_max)
    rows.append(("linearization_convergence_order", order))
    deviations = []
    for theta in thetas:
        params = rigid_top.simulation_params(theta, scn.j)
        report = hilbert.linearized_comparison(params, scn.n_max, scn.j)
        deviations.append(float(np.sum(report.deviations)))

    twist_j = 10.0
    twist_grid = np.linspace(0.0, 0.5, 26)
    sweep_rows = []
    min_vars = []
    for phase in twist_grid:
        min_var, angle = hilbert.twist_squeezing(float(phase), twist_j)
        sweep_rows.append((phase, min_var, angle))
        min_vars.append(min_var)
    tableio.write_rows(out / "twist_sweep.csv",
                       ("twist_phase", "min_variance", "optimal_angle"),
                       sweep_rows)
    rows.append(("twist_sweep_j", twist_j))
    rows.append(("twist_css_variance", twist_j / 2.0))
    rows.append(("twist_min_variance", min(min_vars)))

    tableio.write_rows(out / "exact_checks.csv", ("check", "value"), rows)
    print(f"wrote {out / 'exact_checks.csv'}")
    print(f"wrote {out / 'twist_sweep.csv'}")
    if figures:
        plotting.exact_checks_figure(twist_grid, min_vars, twist_j / 2.0,
                                     thetas, deviations, order,
                                     out / "exact_checks.png")
        print(f"wrote {out / 'exact_checks.png'}")


# ---------------------------------------------------------------------------
# montecarlo


def cmd_montecarlo(scn: scenario_mod.Scenario, out: Path, figures: bool,
                   shots: int | None, fresh_object: bool) -> None:
    shots = scn.shots if shots is None else shots
    params = _scaled_interaction(scn)
    obs = gm.output_observable(params, scn.photons)
    prior = gm.GaussianState.vacuum()
    record = gm.sample_shots(obs, prior, shots, scn.seed,
                             fresh_object=fresh_object)
    tableio.write_rows(out / "montecarlo.csv", ("shot_index", "outcome"),
                       ((i, record.outcomes[i]) for i in range(shots)))

    empirical_mean = float(np.mean(record.outcomes))
    empirical_var = float(np.var(record.outcomes))
    snr_value = gm.snr_from_state(obs, prior)
    posterior = gm.conditional_update(prior, obs, float(record.outcomes[0]))
    summary = [
        ("shots", shots),
        ("seed", scn.seed),
        ("photons", scn.photons),
        ("signal_coeff", obs.signal_coeff),
        ("qp_coeff", obs.qp_coeff),
        ("pp_coeff", obs.pp_coeff),
        ("fresh_object", fresh_object),
        ("object_qo_truth", record.object_qo),
        ("analytic_mean", record.conditional_mean),
        ("analytic_variance", record.conditional_variance),
        ("marginal_variance", record.marginal_variance),
        ("empirical_mean", empirical_mean),
        ("empirical_variance", empirical_var),
        ("variance_ratio", empirical_var / record.conditional_variance),
        ("snr", snr_value),
        ("prior_object_variance", prior.object_variance),
        ("posterior_object_variance", posterior.object_variance),
        ("posterior_over_prior", posterior.object_variance / prior.object_variance),
    ]
    tableio.write_rows(out / "montecarlo_summary.csv", ("quantity", "value"),
                       summary)
    print(f"wrote {out / 'montecarlo.csv'}")
    print(f"wrote {out / 'montecarlo_summary.csv'}")
    if figures:
        plotting.montecarlo_figure(record.outcomes, record.conditional_mean,
                                   record.conditional_variance,
                                   out / "montecarlo.png")
        print(f"wrote {out / 'montecarlo.png'}")


# ---------------------------------------------------------------------------
# top-dynamics


def _parse_omega0(text: str) -> np.ndarray:
    parts = text.split(",")
    if len(parts) != 3:
        raise ConfigError(f"--omega0 expects WX,WY,WZ, got {text!r}")
    try:
        return np.array([float(p) for p in parts])
    except ValueError as exc:
        raise ConfigError(f"--omega0: {exc}") from exc


def cmd_top_dynamics(scn: scenario_mod.Scenario, out: Path, figures: bool,
                     args) -> None:
    inertia = rigid_top.ellipsoid_inertia(scn.top)
    if args.align:
        result = rigid_top.alignment_stabilization_sim(
            inertia,
            trap_stiffness=1e-24, drag=1e-25,
            spin_gain=2.0, spin_target=scn.top.spin_rate,
            angle0=0.5, t_final=20.0, dt=1e-3)
        rows = ((result.times[i], result.spin[i], 0.0, result.angle_rate[i],
                 result.angle[i]) for i in range(result.times.size))
        tableio.write_rows(out / "alignment.csv",
                           ("t", "omega_x", "omega_y", "omega_z", "phi"), rows)
        summary = [
            ("settling_time", result.settling_time),
            ("final_angle", result.final_angle),
            ("final_spin_error", result.final_spin_error),
            ("converged", result.converged),
        ]
        tableio.write_rows(out / "alignment_summary.csv",
                           ("quantity", "value"), summary)
        print(f"wrote {out / 'alignment.csv'}")
        print(f"wrote {out / 'alignment_summary.csv'}")
        if figures:
            plotting.alignment_figure(result.times, result.angle, result.spin,
                                      scn.top.spin_rate, out / "alignment.png")
            print(f"wrote {out / 'alignment.png'}")
        return

    omega0 = (_parse_omega0(args.omega0) if args.omega0 is not None
              else np.array([scn.top.spin_rate, 0.1, 0.0]))
    rate = rigid_top.precession_rate(inertia, float(omega0[1]))
    if args.duration is not None:
        duration = args.duration
    elif rate > 0.0:
        duration = 10.0 * 2.0 * math.pi / rate
    else:
        duration = 10.0 * 2.0 * math.pi / max(np.abs(omega0).max(), 1.0)
    dt = args.dt if args.dt is not None else duration / 20000.0
    if dt <= 0.0 or duration <= 0.0:
        raise ConfigError(f"duration and dt must be positive, got "
                          f"duration={duration}, dt={dt}")
    traj = rigid_top.euler_free_evolution(omega0, inertia, duration, dt)
    rows = ((traj.times[i], traj.omega[i, 0], traj.omega[i, 1],
             traj.omega[i, 2], traj.energy[i], traj.l_squared[i])
            for i in range(traj.times.size))
    tableio.write_rows(
        out / "top_dynamics.csv",
        ("t", "omega_x", "omega_y", "omega_z", "energy", "l_squared"), rows)

    summary = [
        ("energy_drift_max", float(traj.energy_drift.max())),
        ("l_squared_drift_max", float(traj.l2_drift.max())),
        ("precession_rate", rate),
    ]
    if inertia.about_x == inertia.about_z:
        reference = rigid_top.analytic_symmetric_top(omega0, inertia, traj.times)
        transverse = math.hypot(float(omega0[0]), float(omega0[2]))
        if transverse > 0.0:
            dev = float(np.abs(traj.omega - reference).max()) / transverse
            summary.append(("analytic_deviation_rel", dev))
    tableio.write_rows(out / "top_dynamics_summary.csv",
                       ("quantity", "value"), summary)
    print(f"wrote {out / 'top_dynamics.csv'}")
    print(f"wrote {out / 'top_dynamics_summary.csv'}")
    if figures:
        plotting.top_dynamics_figure(traj.times, traj.omega, traj.energy_drift,
                                     traj.l2_drift, out / "top_dynamics.png")
        print(f"wrote {out / 'top_dynamics.png'}")


# ---------------------------------------------------------------------------
# snr-scan


def cmd_snr_scan(scn: scenario_mod.Scenario, out: Path, figures: bool,
                 n_min: float, n_max: float, points: int) -> None:
    if not (0 < n_min < n_max):
        raise ConfigError(f"need 0 < n-min < n-max, got {n_min}, {n_max}")
    if points < 2:
        raise ConfigError(f"need at least 2 points, got {points}")
    inertia = rigid_top.ellipsoid_inertia(scn.top)
    quanta = rigid_top.spin_quanta(inertia, scn.top.spin_rate)
    _, theta = jones_optics.phase_parameters(scn.slab, scn.wavelength)
    photons = np.geomspace(n_min, n_max, points)
    snrs = np.array([gm.snr(float(n), quanta, theta) for n in photons])
    tableio.write_rows(out / "snr_scan.csv", ("photons", "snr"),
                       zip(photons, snrs))
    threshold = gm.solve_photon_number(1.0, quanta, theta)
    tableio.write_rows(out / "snr_scan_summary.csv", ("quantity", "value"),
                       [("photons_for_unit_snr", threshold),
                        ("half_retardance", theta),
                        ("spin_quanta", quanta)])
    print(f"wrote {out / 'snr_scan.csv'}")
    print(f"wrote {out / 'snr_scan_summary.csv'}")
    if figures:
        inside = n_min <= threshold <= n_max
        plotting.snr_scan_figure(photons, snrs,
                                 threshold if inside else None,
                                 out / "snr_scan.png")
        print(f"wrote {out / 'snr_scan.png'}")


# ---------------------------------------------------------------------------


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        scn = _load_scenario(args)
        out = Path(scn.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        figures = not args.no_figures
        if args.command == "paper-numbers":
            cmd_paper_numbers(scn, out, figures)
        elif args.command == "exact-checks":
            cmd_exact_checks(scn, out, figures)
        elif args.command == "montecarlo":
            cmd_montecarlo(scn, out, figures, args.shots, args.fresh_object)
        elif args.command == "top-dynamics":
            cmd_top_dynamics(scn, out, figures, args)
        elif args.command == "snr-scan":
            cmd_snr_scan(scn, out, figures, args.n_min, args.n_max, args.points)
        else:  # pragma: no cover - argparse enforces the choices
            parser.error(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResourceLimitError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ContractError as exc:
        print(f"contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except SpintopError as exc:  # pragma: no cover - catch-all safety net
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
