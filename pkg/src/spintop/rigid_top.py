"""Rigid-body mechanics of the spinning dielectric micro-particle.

The particle is an oblate symmetric-top ellipsoid (equal semi-axes along
body X and Z, shorter along Y) spun about body X.  This module converts its
geometry to inertia moments, counts angular-momentum quanta, packages the
dimensionless parameters driving the optical interaction, and integrates
torque-free Euler dynamics plus a phenomenological alignment/spin-up stage
used for state preparation.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.constants import hbar

from .errors import DomainError, IntegrationQualityError

#: below this many quanta the linearized Gaussian measurement model is not trusted
LINEARIZATION_FLOOR = 1e3
#: relative energy/|L|^2 drift above which fixed-step integration is rejected
DRIFT_TOL = 1e-6


@dataclass(frozen=True)
class SymmetricTop:
    """Uniform ellipsoid: density (kg/m^3), semi-axes (m) and spin rate (rad/s).

    Semi-axes are labelled by the body axis they lie along; the symmetric-top
    constraint is semi_axis_x == semi_axis_z (transverse symmetry about Y)
    with semi_axis_y strictly smaller (oblate).
    """

    density: float
    semi_axis_x: float
    semi_axis_y: float
    semi_axis_z: float
    spin_rate: float

    def __post_init__(self) -> None:
        if self.density <= 0.0:
            raise DomainError(f"density must be positive, got {self.density}")
        for name in ("semi_axis_x", "semi_axis_y", "semi_axis_z"):
            if getattr(self, name) <= 0.0:
                raise DomainError(f"{name} must be positive")
        if abs(self.semi_axis_x - self.semi_axis_z) > 1e-12 * self.semi_axis_x:
            raise DomainError("symmetric top requires semi_axis_x == semi_axis_z")
        if not self.semi_axis_y < self.semi_axis_x:
            raise DomainError("oblate top requires semi_axis_y < semi_axis_x")

    def scaled(self, factor: float) -> "SymmetricTop":
        """Same top with all linear dimensions multiplied by ``factor``."""
        if factor <= 0.0:
            raise DomainError("scale factor must be positive")
        return replace(self,
                       semi_axis_x=self.semi_axis_x * factor,
                       semi_axis_y=self.semi_axis_y * factor,
                       semi_axis_z=self.semi_axis_z * factor)


@dataclass(frozen=True)
class TopInertia:
    """Mass (kg) and principal moments (kg m^2) about the body axes."""

    mass: float
    about_x: float
    about_y: float
    about_z: float

    @property
    def transverse(self) -> float:
        """Common moment about the two equivalent axes (X and Z)."""
        return self.about_x


@dataclass(frozen=True)
class InteractionParams:
    """Dimensionless parameters of one probe pass.

    half_retardance      phase angle from the slab birefringence
    coupling_per_quantum half_retardance rescaled by the quanta count,
                         2 * half_retardance / quanta
    twist_phase          self-twisting phase chi accumulated over the window
                         (negative for an oblate top)
    axis_angle           residual misalignment of the slab axes (rad)
    window               measurement window tau (s)
    quanta               angular-momentum quanta carried by the spin
    """

    half_retardance: float
    coupling_per_quantum: float
    twist_phase: float
    axis_angle: float
    window: float
    quanta: float

    @property
    def gaussian_ok(self) -> bool:
        """True when the quanta count clears the linearized-model floor."""
        return self.quanta >= LINEARIZATION_FLOOR


# ---------------------------------------------------------------------------
# geometry -> inertia -> quanta


def ellipsoid_inertia(top: SymmetricTop) -> TopInertia:
    """Mass and principal moments of the uniform ellipsoid.

    mass = (4/3) pi rho a b c and I_axis = mass * (sum of the squares of the
    two perpendicular semi-axes) / 5.
    """
    a, b, c = top.semi_axis_x, top.semi_axis_y, top.semi_axis_z
    mass = 4.0 / 3.0 * np.pi * top.density * a * b * c
    return TopInertia(
        mass=mass,
        about_x=mass * (b * b + c * c) / 5.0,
        about_y=mass * (a * a + c * c) / 5.0,
        about_z=mass * (a * a + b * b) / 5.0,
    )


def spin_quanta(inertia: TopInertia, spin_rate: float) -> float:
    """Angular-momentum quanta N = I_X * omega_X / hbar of the spinning top."""
    if spin_rate <= 0.0:
        raise DomainError(f"spin rate must be positive, got {spin_rate}")
    return inertia.about_x * spin_rate / hbar


def interaction_params(slab, wavelength: float, top: SymmetricTop,
                       window: float, axis_angle: float = 0.0) -> InteractionParams:
    """Assemble the dimensionless interaction parameters for one probe pass.

    The twisting phase is hbar * (1/(2 I_Y) - 1/(2 I_transverse)) * window,
    negative for the oblate top.
    """
    from .jones_optics import phase_parameters  # local import to avoid a cycle

    if window < 0.0:
        raise DomainError(f"measurement window must be >= 0, got {window}")
    inertia = ellipsoid_inertia(top)
    quanta = spin_quanta(inertia, top.spin_rate)
    _, half_ret = phase_parameters(slab, wavelength)
    twist = hbar * (0.5 / inertia.about_y - 0.5 / inertia.transverse) * window
    return InteractionParams(
        half_retardance=half_ret,
        coupling_per_quantum=2.0 * half_ret / quanta,
        twist_phase=twist,
        axis_angle=axis_angle,
        window=window,
        quanta=quanta,
    )


def simulation_params(half_retardance: float, j: float, twist_phase: float = 0.0,
                      axis_angle: float = 0.0) -> InteractionParams:
    """Parameters for an exact small-spin simulation standing in for the
    macroscopic regime: the coupling is rescaled to 2 * half_retardance / (2 j)
    so the dimensionless structure of the evolution operator is preserved."""
    if j <= 0 or round(2 * j) != 2 * j:
        raise DomainError(f"j must be a positive half-integer, got {j}")
    return InteractionParams(
        half_retardance=half_retardance,
        coupling_per_quantum=2.0 * half_retardance / (2.0 * j),
        twist_phase=twist_phase,
        axis_angle=axis_angle,
        window=0.0,
        quanta=2.0 * j,
    )


# ---------------------------------------------------------------------------
# torque-free Euler dynamics


@dataclass(frozen=True, eq=False)
class TopTrajectory:
    """Fixed-step rigid-body trajectory with conservation monitors.

    times / omega       sample times (s) and body-frame angular velocity rows
    energy / l_squared  rotational energy and squared angular-momentum modulus
    energy_drift / l2_drift   relative deviation from the initial values
    """

    times: np.ndarray
    omega: np.ndarray
    energy: np.ndarray
    l_squared: np.ndarray

    @property
    def energy_drift(self) -> np.ndarray:
        return np.abs(self.energy / self.energy[0] - 1.0)

    @property
    def l2_drift(self) -> np.ndarray:
        return np.abs(self.l_squared / self.l_squared[0] - 1.0)


def _euler_rhs(w: np.ndarray, inertia: TopInertia) -> np.ndarray:
    ix, iy, iz = inertia.about_x, inertia.about_y, inertia.about_z
    return np.array([
        (iy - iz) / ix * w[1] * w[2],
        (iz - ix) / iy * w[2] * w[0],
        (ix - iy) / iz * w[0] * w[1],
    ])


def euler_free_evolution(omega0, inertia: TopInertia, t_final: float, dt: float,
                         drift_tol: float = DRIFT_TOL) -> TopTrajectory:
    """Integrate the torque-free Euler equations with fixed-step RK4.

    Raises IntegrationQualityError when the relative drift of either the
    rotational energy or |L|^2 exceeds ``drift_tol`` anywhere along the
    trajectory — the step size is then too coarse to trust.
    """
    if t_final <= 0.0 or dt <= 0.0:
        raise DomainError("t_final and dt must be positive")
    steps = max(1, int(round(t_final / dt)))
    w = np.asarray(omega0, dtype=float).copy()
    if w.shape != (3,):
        raise DomainError("omega0 must be a 3-vector")

    out = np.empty((steps + 1, 3))
    out[0] = w
    for k in range(steps):
        k1 = _euler_rhs(w, inertia)
        k2 = _euler_rhs(w + 0.5 * dt * k1, inertia)
        k3 = _euler_rhs(w + 0.5 * dt * k2, inertia)
        k4 = _euler_rhs(w + dt * k3, inertia)
        w = w + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[k + 1] = w

    times = np.arange(steps + 1) * dt
    moments = np.array([inertia.about_x, inertia.about_y, inertia.about_z])
    energy = 0.5 * (out ** 2 @ moments)
    l_squared = (out * moments) ** 2 @ np.ones(3)
    traj = TopTrajectory(times=times, omega=out, energy=energy, l_squared=l_squared)

    worst = max(traj.energy_drift.max(), traj.l2_drift.max())
    if worst > drift_tol:
        raise IntegrationQualityError(
            f"conservation drift {worst:.3e} exceeds {drift_tol:.1e}; reduce dt={dt}"
        )
    return traj


def precession_rate(inertia: TopInertia, omega_y: float) -> float:
    """Body-frame rate at which (omega_X, omega_Z) rotate for a symmetric top."""
    return omega_y * (inertia.about_y - inertia.transverse) / inertia.transverse


def analytic_symmetric_top(omega0, inertia: TopInertia, times) -> np.ndarray:
    """Exact torque-free solution for the symmetric top (about_x == about_z).

    omega_Y is constant and the (omega_X, omega_Z) pair rotates at
    :func:`precession_rate`.  Used as the integrator oracle.
    """
    if abs(inertia.about_x - inertia.about_z) > 1e-9 * inertia.about_x:
        raise DomainError("analytic solution requires about_x == about_z")
    w0 = np.asarray(omega0, dtype=float)
    times = np.asarray(times, dtype=float)
    rate = precession_rate(inertia, w0[1])
    phase = rate * times
    out = np.empty((times.size, 3))
    out[:, 0] = w0[0] * np.cos(phase) + w0[2] * np.sin(phase)
    out[:, 1] = w0[1]
    out[:, 2] = -w0[0] * np.sin(phase) + w0[2] * np.cos(phase)
    return out


# ---------------------------------------------------------------------------
# alignment / spin-up preparation stage


@dataclass(frozen=True, eq=False)
class AlignmentResult:
    """Outcome of the trap-and-feedback preparation simulation.

    settling_time is the first time after which |alignment angle| stays
    below the threshold for the rest of the run, or NaN when that never
    happens (reported, not an error).
    """

    times: np.ndarray
    angle: np.ndarray
    angle_rate: np.ndarray
    spin: np.ndarray
    settling_time: float
    final_angle: float
    final_spin_error: float
    converged: bool


def alignment_stabilization_sim(inertia: TopInertia, *, trap_stiffness: float,
                                drag: float, spin_gain: float, spin_target: float,
                                angle0: float, angle_rate0: float = 0.0,
                                spin0: float = 0.0, t_final: float = 10.0,
                                dt: float = 1e-3,
                                settle_threshold: float = 1e-3) -> AlignmentResult:
    """Phenomenological alignment trap plus spin-up feedback.

    Integrates angle'' = (-trap_stiffness * sin(2 angle) - drag * angle') /
    I_Z together with spin' = spin_gain * (spin_target - spin) using RK4.
    All control coefficients must be >= 0; zero coefficients switch the
    corresponding mechanism off (free drift when all are zero).
    """
    if min(trap_stiffness, drag, spin_gain) < 0.0:
        raise DomainError("control coefficients must be >= 0")
    if t_final <= 0.0 or dt <= 0.0:
        raise DomainError("t_final and dt must be positive")

    iz = inertia.about_z

    def rhs(y: np.ndarray) -> np.ndarray:
        angle, rate, spin = y
        return np.array([
            rate,
            (-trap_stiffness * np.sin(2.0 * angle) - drag * rate) / iz,
            spin_gain * (spin_target - spin),
        ])

    steps = max(1, int(round(t_final / dt)))
    y = np.array([angle0, angle_rate0, spin0], dtype=float)
    out = np.empty((steps + 1, 3))
    out[0] = y
    for k in range(steps):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * dt * k1)
        k3 = rhs(y + 0.5 * dt * k2)
        k4 = rhs(y + dt * k3)
        y = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[k + 1] = y

    times = np.arange(steps + 1) * dt
    inside = np.abs(out[:, 0]) < settle_threshold
    # first index from which the angle stays inside the threshold band
    settled_from = None
    for idx in range(inside.size - 1, -1, -1):
        if not inside[idx]:
            settled_from = idx + 1
            break
    if settled_from is None:
        settled_from = 0
    settling = times[settled_from] if settled_from < inside.size else float("nan")
    converged = settled_from < inside.size

    return AlignmentResult(
        times=times,
        angle=out[:, 0],
        angle_rate=out[:, 1],
        spin=out[:, 2],
        settling_time=float(settling) if converged else float("nan"),
        final_angle=float(out[-1, 0]),
        final_spin_error=float(abs(spin_target - out[-1, 2])),
        converged=bool(converged),
    )
