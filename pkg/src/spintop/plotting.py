"""Figure rendering for the CLI report paths (headless, file output only)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_RC = {
    "figure.dpi": 120,
    "savefig.bbox": "tight",
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 9,
}


def _save(fig, path) -> None:
    fig.savefig(path)
    plt.close(fig)


def paper_numbers_figure(labels, deviations, path) -> None:
    """Horizontal bars of relative deviation from the reference values."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6, 0.4 * len(labels) + 1.2))
        ypos = np.arange(len(labels))
        ax.barh(ypos, np.asarray(deviations) * 100.0, color="#4878d0")
        ax.set_yticks(ypos, labels)
        ax.invert_yaxis()
        ax.axvline(0.0, color="k", lw=0.8)
        ax.set_xlabel("relative deviation from reference [%]")
        ax.set_title("scenario values vs reference")
        _save(fig, path)


def exact_checks_figure(twist_phases, min_variances, css_variance,
                        thetas, deviations, fitted_order, path) -> None:
    """Twist-squeezing curve and linearization convergence, side by side."""
    with plt.rc_context(_RC):
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.4))
        ax1.plot(twist_phases, min_variances, "o-", ms=3, color="#4878d0")
        ax1.axhline(css_variance, color="#d65f5f", ls="--", lw=1,
                    label="coherent-state value j/2")
        ax1.set_xlabel("twist phase")
        ax1.set_ylabel("min transverse variance")
        ax1.set_title("one-axis twisting")
        ax1.legend()
        ax2.loglog(thetas, deviations, "o-", ms=4, color="#4878d0")
        ax2.set_xlabel("half retardance")
        ax2.set_ylabel("exact vs linearized deviation")
        ax2.set_title(f"convergence (fitted order {fitted_order:.2f})")
        _save(fig, path)


def montecarlo_figure(outcomes, mean, variance, path) -> None:
    """Outcome histogram with the analytic Gaussian overlaid."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6, 3.6))
        ax.hist(outcomes, bins=80, density=True, color="#4878d0", alpha=0.7,
                label=f"{outcomes.size} shots")
        sd = float(np.sqrt(variance))
        grid = np.linspace(mean - 4.5 * sd, mean + 4.5 * sd, 400)
        ax.plot(grid, np.exp(-0.5 * ((grid - mean) / sd) ** 2)
                / (sd * np.sqrt(2 * np.pi)), color="#d65f5f", lw=1.5,
                label="analytic")
        ax.set_xlabel("homodyne outcome")
        ax.set_ylabel("density")
        ax.set_title("shot-noise Monte Carlo")
        ax.legend()
        _save(fig, path)


def top_dynamics_figure(times, omega, energy_drift, l2_drift, path) -> None:
    """Body-frame angular velocity components and conservation drift."""
    with plt.rc_context(_RC):
        fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6.5, 5), sharex=True,
                                       height_ratios=[2, 1])
        for idx, name in enumerate(("omega_x", "omega_y", "omega_z")):
            ax1.plot(times, omega[:, idx], lw=1, label=name)
        ax1.set_ylabel("angular velocity [rad/s]")
        ax1.set_title("torque-free precession")
        ax1.legend(ncols=3)
        ax2.semilogy(times, np.maximum(energy_drift, 1e-18), lw=1,
                     label="energy drift")
        ax2.semilogy(times, np.maximum(l2_drift, 1e-18), lw=1,
                     label="|L|^2 drift")
        ax2.set_xlabel("time [s]")
        ax2.set_ylabel("relative drift")
        ax2.legend(ncols=2)
        _save(fig, path)


def alignment_figure(times, angle, spin, spin_target, path) -> None:
    """Alignment angle decay and spin-up toward the target rate."""
    with plt.rc_context(_RC):
        fig, ax1 = plt.subplots(figsize=(6.5, 3.6))
        ax1.plot(times, angle, color="#4878d0", lw=1.2, label="axis angle")
        ax1.set_xlabel("time [s]")
        ax1.set_ylabel("alignment angle [rad]", color="#4878d0")
        ax2 = ax1.twinx()
        ax2.plot(times, spin, color="#d65f5f", lw=1.2, label="spin rate")
        ax2.axhline(spin_target, color="#d65f5f", ls="--", lw=0.8)
        ax2.set_ylabel("spin rate [rad/s]", color="#d65f5f")
        ax2.grid(False)
        ax1.set_title("alignment and spin-up stage")
        _save(fig, path)


def snr_scan_figure(photons, snrs, threshold_photons, path) -> None:
    """SNR vs probe photon number with the unity crossing marked."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6, 3.6))
        ax.loglog(photons, snrs, "-", color="#4878d0", lw=1.5)
        ax.axhline(1.0, color="#d65f5f", ls="--", lw=1)
        if threshold_photons is not None:
            ax.axvline(threshold_photons, color="#d65f5f", ls=":", lw=1,
                       label=f"SNR=1 at n={threshold_photons:.3g}")
            ax.legend()
        ax.set_xlabel("probe photons per pulse")
        ax.set_ylabel("SNR")
        ax.set_title("signal-to-noise scan")
        _save(fig, path)
