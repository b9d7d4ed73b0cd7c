"""Rigid-body layer: inertia, quanta counting, Euler dynamics, preparation.

Oracle values for the quartz scenario (density 2650 kg/m^3, semi-axes
2/1/2 um, 1 Hz spin) were frozen from an independent numerical volume
integration of the ellipsoid inertia integrals; they agree with the closed
form to 14 digits.
"""

import math

import numpy as np
import pytest

from spintop import rigid_top as rt
from spintop.errors import DomainError, IntegrationQualityError
from spintop.jones_optics import BirefringentSlab

QUARTZ_TOP = rt.SymmetricTop(density=2650.0, semi_axis_x=2e-6,
                             semi_axis_y=1e-6, semi_axis_z=2e-6,
                             spin_rate=2.0 * math.pi)
QUARTZ_SLAB = BirefringentSlab(n_e=1.553, n_o=1.544, length=2e-6)
WAVELENGTH = 600e-9

MASS = 4.440117617073575e-14            # kg
INERTIA_TRANSVERSE = 4.4401176170735737e-26  # kg m^2, about X and Z
INERTIA_SPIN_AXIS = 7.104188187317717e-26    # kg m^2, about Y
QUANTA = 2645441619.7102127             # I_X * (2 pi rad/s) / hbar
COUPLING = 7.125296502896693e-11        # 2 theta / quanta
TWIST_1MS = -4.453310314310484e-13      # chi over a 1 ms window


def test_quartz_mass_and_inertia():
    inertia = rt.ellipsoid_inertia(QUARTZ_TOP)
    assert inertia.mass == pytest.approx(MASS, rel=1e-12)
    assert inertia.about_x == pytest.approx(INERTIA_TRANSVERSE, rel=1e-12)
    assert inertia.about_z == pytest.approx(INERTIA_TRANSVERSE, rel=1e-12)
    assert inertia.about_y == pytest.approx(INERTIA_SPIN_AXIS, rel=1e-12)


def test_inertia_is_oblate_ordered():
    inertia = rt.ellipsoid_inertia(QUARTZ_TOP)
    assert inertia.about_y > inertia.about_x
    assert inertia.transverse == inertia.about_x


def test_scaling_laws():
    """Mass grows as scale^3 and every moment as scale^5."""
    inertia = rt.ellipsoid_inertia(QUARTZ_TOP)
    scaled = rt.ellipsoid_inertia(QUARTZ_TOP.scaled(2.0))
    assert scaled.mass == pytest.approx(8.0 * inertia.mass, rel=1e-12)
    for name in ("about_x", "about_y", "about_z"):
        assert getattr(scaled, name) == pytest.approx(
            32.0 * getattr(inertia, name), rel=1e-12)


def test_symmetric_top_validation():
    with pytest.raises(DomainError):
        rt.SymmetricTop(density=-1.0, semi_axis_x=2e-6, semi_axis_y=1e-6,
                        semi_axis_z=2e-6, spin_rate=1.0)
    with pytest.raises(DomainError):
        rt.SymmetricTop(density=2650.0, semi_axis_x=2e-6, semi_axis_y=1e-6,
                        semi_axis_z=3e-6, spin_rate=1.0)
    with pytest.raises(DomainError):  # prolate, not oblate
        rt.SymmetricTop(density=2650.0, semi_axis_x=1e-6, semi_axis_y=2e-6,
                        semi_axis_z=1e-6, spin_rate=1.0)
    with pytest.raises(DomainError):
        QUARTZ_TOP.scaled(0.0)


def test_spin_quanta_quartz():
    inertia = rt.ellipsoid_inertia(QUARTZ_TOP)
    assert rt.spin_quanta(inertia, QUARTZ_TOP.spin_rate) == pytest.approx(
        QUANTA, rel=1e-12)
    with pytest.raises(DomainError):
        rt.spin_quanta(inertia, 0.0)


def test_interaction_params_quartz():
    params = rt.interaction_params(QUARTZ_SLAB, WAVELENGTH, QUARTZ_TOP,
                                   window=1e-3)
    assert params.half_retardance == pytest.approx(0.09424777960769272,
                                                   rel=1e-12)
    assert params.coupling_per_quantum == pytest.approx(COUPLING, rel=1e-12)
    assert params.twist_phase == pytest.approx(TWIST_1MS, rel=1e-12)
    assert params.quanta == pytest.approx(QUANTA, rel=1e-12)
    assert params.gaussian_ok
    assert params.twist_phase < 0.0  # oblate: 1/(2 I_Y) < 1/(2 I_perp)


def test_interaction_window_scaling():
    p1 = rt.interaction_params(QUARTZ_SLAB, WAVELENGTH, QUARTZ_TOP, window=1.0)
    p2 = rt.interaction_params(QUARTZ_SLAB, WAVELENGTH, QUARTZ_TOP, window=2.0)
    assert p2.twist_phase == pytest.approx(2.0 * p1.twist_phase, rel=1e-12)
    with pytest.raises(DomainError):
        rt.interaction_params(QUARTZ_SLAB, WAVELENGTH, QUARTZ_TOP, window=-1.0)


def test_simulation_params():
    params = rt.simulation_params(0.05, 4.0)
    assert params.coupling_per_quantum == pytest.approx(0.05 / 4.0, rel=1e-14)
    assert params.quanta == 8.0
    assert not params.gaussian_ok  # 8 quanta is far below the floor
    with pytest.raises(DomainError):
        rt.simulation_params(0.05, 0.3)


# ---------------------------------------------------------------------------
# dynamics


def _quartz_inertia() -> rt.TopInertia:
    return rt.ellipsoid_inertia(QUARTZ_TOP)


def test_principal_axis_spin_is_constant():
    inertia = _quartz_inertia()
    traj = rt.euler_free_evolution(np.array([2.0 * math.pi, 0.0, 0.0]),
                                   inertia, t_final=10.0, dt=0.01)
    assert np.abs(traj.omega - traj.omega[0]).max() < 1e-12
    assert traj.energy_drift.max() < 1e-14


def test_precession_rate_quartz():
    # (I_Y - I_perp)/I_perp = (a^2 - b^2)/(b^2 + c^2) = 3/5 exactly here
    inertia = _quartz_inertia()
    assert rt.precession_rate(inertia, 0.1) == pytest.approx(0.06, rel=1e-12)


def test_euler_matches_analytic_symmetric_top():
    """Ten precession periods with tilted spin: phase agreement far below
    the 1e-6 contract tolerance."""
    inertia = _quartz_inertia()
    omega0 = np.array([2.0 * math.pi, 0.1, 0.0])
    rate = rt.precession_rate(inertia, 0.1)
    duration = 10.0 * 2.0 * math.pi / rate
    traj = rt.euler_free_evolution(omega0, inertia, duration, duration / 20000.0)
    reference = rt.analytic_symmetric_top(omega0, inertia, traj.times)
    transverse = math.hypot(omega0[0], omega0[2])
    assert np.abs(traj.omega - reference).max() / transverse < 1e-8
    assert traj.energy_drift.max() < 1e-10
    assert traj.l2_drift.max() < 1e-10


def test_coarse_step_rejected():
    inertia = rt.TopInertia(mass=1.0, about_x=1.0, about_y=2.0, about_z=3.0)
    with pytest.raises(IntegrationQualityError):
        rt.euler_free_evolution(np.array([1.0, 1.0, 1.0]), inertia,
                                t_final=50.0, dt=0.5)


def test_asymmetric_tumbling_conserves_invariants():
    # fully asymmetric inertia exercises all three Euler couplings
    inertia = rt.TopInertia(mass=1.0, about_x=1.0, about_y=2.0, about_z=3.0)
    traj = rt.euler_free_evolution(np.array([1.0, 1.0, 1.0]), inertia,
                                   t_final=20.0, dt=1e-3)
    assert traj.energy_drift.max() < 1e-9
    assert traj.l2_drift.max() < 1e-9


def test_analytic_solution_requires_symmetric_inertia():
    inertia = rt.TopInertia(mass=1.0, about_x=1.0, about_y=2.0, about_z=3.0)
    with pytest.raises(DomainError):
        rt.analytic_symmetric_top(np.array([1.0, 0.0, 0.0]), inertia,
                                  np.linspace(0.0, 1.0, 5))


def test_free_evolution_input_validation():
    inertia = _quartz_inertia()
    with pytest.raises(DomainError):
        rt.euler_free_evolution(np.zeros(2), inertia, 1.0, 0.1)
    with pytest.raises(DomainError):
        rt.euler_free_evolution(np.zeros(3), inertia, -1.0, 0.1)


# ---------------------------------------------------------------------------
# preparation stage


def test_alignment_sim_converges_to_trap_center():
    inertia = _quartz_inertia()
    result = rt.alignment_stabilization_sim(
        inertia, trap_stiffness=1e-24, drag=1e-25, spin_gain=2.0,
        spin_target=QUARTZ_TOP.spin_rate, angle0=0.5, t_final=20.0, dt=1e-3)
    assert result.converged
    assert result.settling_time < 20.0
    assert abs(result.final_angle) < 1e-6
    assert result.final_spin_error < 1e-6
    assert result.spin[0] == 0.0


def test_alignment_sim_without_controls_never_settles():
    inertia = _quartz_inertia()
    result = rt.alignment_stabilization_sim(
        inertia, trap_stiffness=0.0, drag=0.0, spin_gain=0.0,
        spin_target=QUARTZ_TOP.spin_rate, angle0=0.3, t_final=2.0, dt=1e-3)
    assert not result.converged
    assert math.isnan(result.settling_time)
    np.testing.assert_allclose(result.angle, 0.3, atol=1e-12)


def test_alignment_sim_rejects_negative_gains():
    with pytest.raises(DomainError):
        rt.alignment_stabilization_sim(
            _quartz_inertia(), trap_stiffness=-1.0, drag=0.0, spin_gain=0.0,
            spin_target=1.0, angle0=0.1)
