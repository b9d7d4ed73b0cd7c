"""Classical Jones-calculus layer.

The quartz slab numbers used as oracles below were frozen from direct
evaluation of k = 2 pi n / lambda with n_e = 1.553, n_o = 1.544,
lambda = 600 nm and length 2 um.
"""

import numpy as np
import pytest

from spintop import jones_optics as jo
from spintop.errors import ContractError, DomainError

QUARTZ = jo.BirefringentSlab(n_e=1.553, n_o=1.544, length=2e-6)
WAVELENGTH = 600e-9

# frozen: 2 pi (n_e - n_o) / lambda and the slab phase pair
K_DIFF = 94247.77960769272
HALF_RETARDANCE = 0.09424777960769272
COMMON_PHASE = 32.43170816055863
COMMON_PHASE_MOD = 1.015781624660697


def test_wavenumbers_quartz():
    k_e, k_o = jo.wavenumbers(QUARTZ, WAVELENGTH)
    assert k_e > k_o > 0.0
    assert k_e - k_o == pytest.approx(K_DIFF, rel=1e-12)
    assert k_e == pytest.approx(2.0 * np.pi * 1.553 / WAVELENGTH, rel=1e-14)


def test_phase_parameters_quartz():
    common, half_ret = jo.phase_parameters(QUARTZ, WAVELENGTH)
    assert half_ret == pytest.approx(HALF_RETARDANCE, rel=1e-12)
    assert common == pytest.approx(COMMON_PHASE, rel=1e-12)


def test_wavenumbers_rejects_bad_wavelength():
    with pytest.raises(DomainError):
        jo.wavenumbers(QUARTZ, 0.0)


@pytest.mark.parametrize("n_e,n_o,length", [
    (1.544, 1.553, 2e-6),   # swapped indices
    (1.553, 0.9, 2e-6),     # n_o below vacuum
    (1.553, 1.544, 0.0),    # no path
])
def test_slab_validation(n_e, n_o, length):
    with pytest.raises(DomainError):
        jo.BirefringentSlab(n_e=n_e, n_o=n_o, length=length)


def test_probe_light_amp_norm_enforced():
    with pytest.raises(DomainError):
        jo.ProbeLight(wavelength=600e-9, photons=4.0, amp_x=1.0, amp_y=0.0)
    probe = jo.ProbeLight.x_polarized(4.0, 600e-9)
    assert probe.amp_x == pytest.approx(2.0)
    assert probe.amp_y == 0.0


def test_slab_jones_diagonal_and_unitary():
    jones = jo.slab_jones(QUARTZ, WAVELENGTH)
    k_e, k_o = jo.wavenumbers(QUARTZ, WAVELENGTH)
    assert jones[0, 1] == 0.0 and jones[1, 0] == 0.0
    assert jones[0, 0] == pytest.approx(np.exp(1j * k_e * QUARTZ.length))
    assert jones[1, 1] == pytest.approx(np.exp(1j * k_o * QUARTZ.length))
    assert jo.unitarity_defect(jones) < 1e-12


def test_rotation_matrices_compose():
    rng = np.random.default_rng(7)
    for _ in range(20):
        a, b = rng.uniform(-np.pi, np.pi, 2)
        np.testing.assert_allclose(
            jo.rotation_matrix(a) @ jo.rotation_matrix(b),
            jo.rotation_matrix(a + b), atol=1e-14)
    np.testing.assert_allclose(jo.rotation_matrix(0.0), np.eye(2), atol=0)


def test_rotated_slab_reduces_at_zero_angle():
    jones = jo.slab_jones(QUARTZ, WAVELENGTH)
    np.testing.assert_allclose(jo.rotated_slab_jones(jones, 0.0), jones,
                               atol=1e-15)
    # rotating by pi conjugates by -identity, leaving the matrix unchanged
    np.testing.assert_allclose(jo.rotated_slab_jones(jones, np.pi), jones,
                               atol=1e-12)


def test_circular_basis_is_unitary_change():
    rng = np.random.default_rng(11)
    m = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    np.testing.assert_allclose(jo.from_circular_basis(jo.to_circular_basis(m)),
                               m, atol=1e-14)


def test_decomposition_of_rotated_quartz_slab():
    """Common phase, half retardance and axis angle come back exactly."""
    jones = jo.slab_jones(QUARTZ, WAVELENGTH)
    for phi in (-0.7, -0.2, 0.0, 0.3, 1.1):
        rotated = jo.rotated_slab_jones(jones, phi)
        common, half_ret, axis = jo.circular_basis_decomposition(rotated)
        assert common == pytest.approx(COMMON_PHASE_MOD, rel=1e-9)
        assert half_ret == pytest.approx(HALF_RETARDANCE, rel=1e-9)
        assert axis == pytest.approx(phi, abs=1e-9)


def test_decomposition_round_trip_random():
    rng = np.random.default_rng(23)
    for _ in range(50):
        common = rng.uniform(0.0, 2.0 * np.pi)
        half_ret = rng.uniform(1e-3, np.pi / 2.0 - 1e-3)
        axis = rng.uniform(-np.pi / 2.0 + 1e-3, np.pi / 2.0)
        jones = jo.jones_from_decomposition(common, half_ret, axis)
        got = jo.circular_basis_decomposition(jones)
        assert got[0] == pytest.approx(common, abs=1e-10)
        assert got[1] == pytest.approx(half_ret, abs=1e-10)
        assert got[2] == pytest.approx(axis, abs=1e-10)


def test_decomposition_rejects_nonunitary():
    with pytest.raises(ContractError):
        jo.circular_basis_decomposition(2.0 * np.eye(2))


def test_decomposition_rejects_circular_retarder():
    # an optical rotator is sigma_z-generated in the circular basis and is
    # not expressible as a rotated linear retarder
    alpha = 0.3
    rotator = jo.from_circular_basis(
        np.diag([np.exp(1j * alpha), np.exp(-1j * alpha)]))
    with pytest.raises(ContractError):
        jo.circular_basis_decomposition(rotator)


def test_translation_generator_coefficients():
    gen = jo.translation_generator(QUARTZ, 0.05, WAVELENGTH)
    k_e, k_o = jo.wavenumbers(QUARTZ, WAVELENGTH)
    assert gen.s0_coeff == pytest.approx(0.5 * (k_e + k_o), rel=1e-14)
    assert gen.sx_coeff == pytest.approx(0.5 * (k_e - k_o), rel=1e-14)
    assert gen.sy_coeff == pytest.approx(0.05 * (k_e - k_o), rel=1e-14)
    assert gen.small_angle_ok
    assert not jo.translation_generator(QUARTZ, 0.2, WAVELENGTH).small_angle_ok


def test_generator_exponential_error_is_quadratic_in_angle():
    e1 = jo.generator_exponential_error(QUARTZ, 0.02, WAVELENGTH)
    e2 = jo.generator_exponential_error(QUARTZ, 0.04, WAVELENGTH)
    assert e2 / e1 == pytest.approx(4.0, rel=0.2)
    assert jo.generator_exponential_error(QUARTZ, 0.0, WAVELENGTH) < 1e-12


def test_stokes_sign_conventions():
    n = 4.0
    np.testing.assert_allclose(jo.stokes_from_amplitudes(np.sqrt(n), 0.0),
                               [n, n, 0.0, 0.0], atol=1e-12)
    amp = np.sqrt(n / 2.0)
    np.testing.assert_allclose(jo.stokes_from_amplitudes(amp, amp),
                               [n, 0.0, -n, 0.0], atol=1e-12)
    np.testing.assert_allclose(jo.stokes_from_amplitudes(amp, 1j * amp),
                               [n, 0.0, 0.0, -n], atol=1e-12)


def test_propagation_conserves_intensity():
    probe = jo.ProbeLight.x_polarized(9.0, WAVELENGTH)
    jones = jo.rotated_slab_jones(jo.slab_jones(QUARTZ, WAVELENGTH), 0.4)
    _, stokes = jo.propagate_classical(probe, jones)
    assert stokes[0] == pytest.approx(9.0, rel=1e-12)


def test_propagation_rejects_lossy_matrix():
    probe = jo.ProbeLight.x_polarized(1.0, WAVELENGTH)
    with pytest.raises(ContractError):
        jo.propagate_classical(probe, 0.5 * np.eye(2))


def _su2_to_so3(half_retardance: float, axis_angle: float) -> np.ndarray:
    """Rodrigues rotation by -2*half_retardance about the in-plane axis
    (cos 2 phi, sin 2 phi, 0) — the classical Stokes-space image of the
    circular-basis SU(2) retarder, used as an independent oracle.  The sign
    matches the (Sy, Sz) block of the linearized quantum map."""
    angle = -2.0 * half_retardance
    axis = np.array([np.cos(2.0 * axis_angle), np.sin(2.0 * axis_angle), 0.0])
    k = np.array([
        [0.0, -axis[2], axis[1]],
        [axis[2], 0.0, -axis[0]],
        [-axis[1], axis[0], 0.0],
    ])
    return np.eye(3) + np.sin(angle) * k + (1.0 - np.cos(angle)) * (k @ k)


def test_propagation_matches_stokes_rotation():
    """Jones propagation and the SO(3) Stokes rotation agree exactly."""
    rng = np.random.default_rng(31)
    jones0 = jo.slab_jones(QUARTZ, WAVELENGTH)
    for _ in range(25):
        phi = rng.uniform(-np.pi / 2, np.pi / 2)
        amps = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        photons = float(abs(amps[0]) ** 2 + abs(amps[1]) ** 2)
        probe = jo.ProbeLight(wavelength=WAVELENGTH, photons=photons,
                              amp_x=complex(amps[0]), amp_y=complex(amps[1]))
        _, stokes_out = jo.propagate_classical(
            probe, jo.rotated_slab_jones(jones0, phi))
        rot = _su2_to_so3(HALF_RETARDANCE, phi)
        stokes_in = jo.stokes_from_amplitudes(probe.amp_x, probe.amp_y)
        np.testing.assert_allclose(stokes_out[1:], rot @ stokes_in[1:],
                                   atol=1e-9 * photons)
        assert stokes_out[0] == pytest.approx(photons, rel=1e-12)
