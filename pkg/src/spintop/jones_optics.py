"""Classical polarization optics for a rotating birefringent slab.

Conventions
-----------
* Jones vectors hold the (x, y) linear field amplitudes; matrices act from
  the left.
* The circular basis is reached with U = [[1, i], [1, -i]] / sqrt(2), i.e.
  amp_plus = (amp_x + i amp_y) / sqrt(2) and amp_minus = (amp_x - i amp_y)
  / sqrt(2).  In that basis a slab with its fast axis rotated by
  ``axis_angle`` is

      exp(i * common_phase * S0
          + i * half_retardance * (cos(2 phi) Sx + sin(2 phi) Sy))

  with S0 = identity, Sx = [[0, 1], [1, 0]], Sy = [[0, -i], [i, 0]],
  common_phase = (k_e + k_o) * length / 2 and
  half_retardance = (k_e - k_o) * length / 2.
* Stokes components follow the same operator ordering as the quantized ones
  in :mod:`spintop.hilbert`: S0 = |x|^2 + |y|^2, Sx = |x|^2 - |y|^2,
  Sy = -2 Re(conj(x) y), Sz = -2 Im(conj(x) y).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError, DomainError

UNITARITY_TOL = 1e-8
#: |axis_angle| above which the linear-in-angle generator is flagged
SMALL_ANGLE_LIMIT = 0.1

_SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
_SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
#: linear (x, y) -> circular (+, -) amplitude change of basis
_TO_CIRCULAR = np.array([[1.0, 1.0j], [1.0, -1.0j]], dtype=complex) / np.sqrt(2.0)


@dataclass(frozen=True)
class BirefringentSlab:
    """Uniaxial slab: extraordinary/ordinary indices and optical path length (m)."""

    n_e: float
    n_o: float
    length: float

    def __post_init__(self) -> None:
        if not (self.n_e > self.n_o > 1.0):
            raise DomainError(
                f"slab indices must satisfy n_e > n_o > 1, got n_e={self.n_e}, n_o={self.n_o}"
            )
        if not self.length > 0.0:
            raise DomainError(f"slab length must be positive, got {self.length}")


@dataclass(frozen=True)
class ProbeLight:
    """Probe beam: wavelength (m), mean photon number and (x, y) amplitudes.

    The amplitudes are dimensionless mode amplitudes normalized so that
    |amp_x|^2 + |amp_y|^2 equals the photon number.
    """

    wavelength: float
    photons: float
    amp_x: complex = 0.0
    amp_y: complex = 0.0

    def __post_init__(self) -> None:
        if not self.wavelength > 0.0:
            raise DomainError(f"wavelength must be positive, got {self.wavelength}")
        if self.photons < 0.0:
            raise DomainError(f"photon number must be >= 0, got {self.photons}")
        norm = abs(self.amp_x) ** 2 + abs(self.amp_y) ** 2
        if norm > 0.0 and abs(norm - self.photons) > 1e-6 * max(1.0, self.photons):
            raise DomainError(
                "amplitude norm |amp_x|^2+|amp_y|^2 must equal the photon number"
            )

    @classmethod
    def x_polarized(cls, photons: float, wavelength: float) -> "ProbeLight":
        return cls(wavelength=wavelength, photons=photons,
                   amp_x=complex(np.sqrt(photons)), amp_y=0.0)


@dataclass(frozen=True)
class GeneratorCoefficients:
    """Stokes-operator coefficients of the spatial-translation generator.

    The generator reads hbar * (s0_coeff * S0 + sx_coeff * Sx + sy_coeff * Sy)
    with the coefficients in rad/m, so ex.(i * length * (s0_coeff S0 + ...))
    reproduces the circular-basis slab matrix to second order in the axis
    angle.  ``small_angle_ok`` is False when |axis_angle| > 0.1 and the
    linear-in-angle form should not be trusted.
    """

    k_e: float
    k_o: float
    s0_coeff: float
    sx_coeff: float
    sy_coeff: float
    axis_angle: float
    small_angle_ok: bool


# ---------------------------------------------------------------------------
# construction


def wavenumbers(slab: BirefringentSlab, wavelength: float) -> tuple[float, float]:
    """(k_e, k_o) in rad/m for the two slab eigenpolarizations."""
    if wavelength <= 0.0:
        raise DomainError(f"wavelength must be positive, got {wavelength}")
    return 2.0 * np.pi * slab.n_e / wavelength, 2.0 * np.pi * slab.n_o / wavelength


def phase_parameters(slab: BirefringentSlab, wavelength: float) -> tuple[float, float]:
    """(common_phase, half_retardance) accumulated over the slab length.

    common_phase = (k_e + k_o) length / 2, half_retardance = (k_e - k_o)
    length / 2; the full retardance between the eigenaxes is twice the
    latter.
    """
    k_e, k_o = wavenumbers(slab, wavelength)
    return 0.5 * (k_e + k_o) * slab.length, 0.5 * (k_e - k_o) * slab.length


def slab_jones(slab: BirefringentSlab, wavelength: float) -> np.ndarray:
    """Jones matrix diag(e^{i k_e l}, e^{i k_o l}) of the untilted slab."""
    k_e, k_o = wavenumbers(slab, wavelength)
    return np.diag(np.exp(1j * np.array([k_e, k_o]) * slab.length))


def rotation_matrix(angle: float) -> np.ndarray:
    """In-plane axis rotation, R(a) = [[cos a, sin a], [-sin a, cos a]]."""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, s], [-s, c]], dtype=complex)


def rotated_slab_jones(jones: np.ndarray, axis_angle: float) -> np.ndarray:
    """Conjugate a Jones matrix by an axis rotation: R(phi) J R(-phi)."""
    r = rotation_matrix(axis_angle)
    return r @ jones @ r.conj().T


def unitarity_defect(jones: np.ndarray) -> float:
    """Spectral-norm distance of J^dag J from the identity."""
    jones = np.asarray(jones, dtype=complex)
    return float(np.linalg.norm(jones.conj().T @ jones - np.eye(2), 2))


# ---------------------------------------------------------------------------
# circular basis


def to_circular_basis(jones: np.ndarray) -> np.ndarray:
    """Rewrite a linear-basis Jones matrix in the circular (+, -) basis."""
    return _TO_CIRCULAR @ np.asarray(jones, dtype=complex) @ _TO_CIRCULAR.conj().T


def from_circular_basis(jones_circ: np.ndarray) -> np.ndarray:
    return _TO_CIRCULAR.conj().T @ np.asarray(jones_circ, dtype=complex) @ _TO_CIRCULAR


def circular_basis_decomposition(jones: np.ndarray) -> tuple[float, float, float]:
    """Recover (common_phase mod 2pi, half_retardance, axis_angle) from a
    rotated-retarder Jones matrix.

    The representation is made unique by half_retardance >= 0 (and <= pi/2),
    axis_angle in (-pi/2, pi/2], and axis_angle = 0 when the retardance
    vanishes.  Raises ContractError if the matrix is not unitary or carries a
    circular-retarder (sigma_z) component, which a rotated linear retarder
    never does.
    """
    jones = np.asarray(jones, dtype=complex)
    defect = unitarity_defect(jones)
    if defect > UNITARITY_TOL:
        raise ContractError(f"matrix is not unitary (defect {defect:.2e})")

    m = to_circular_basis(jones)
    # global phase from the determinant, then an SU(2) part
    common = 0.5 * np.angle(np.linalg.det(m))
    m0 = np.exp(-1j * common) * m
    ident_part = 0.5 * np.trace(m0).real
    bx = (0.5 * np.trace(_SIGMA_X @ m0) / 1j).real
    by = (0.5 * np.trace(_SIGMA_Y @ m0) / 1j).real
    bz = (0.5 * np.trace(_SIGMA_Z @ m0) / 1j).real
    if abs(bz) > 1e-7:
        raise ContractError(
            f"matrix has a circular-retarder component ({bz:.2e}); "
            "not a rotated linear retarder"
        )

    # choose the branch with cos(half_retardance) >= 0 so the angle is <= pi/2
    if ident_part < 0.0:
        common += np.pi
        ident_part, bx, by = -ident_part, -bx, -by
    transverse = float(np.hypot(bx, by))
    half_ret = float(np.arctan2(transverse, ident_part))

    if transverse < 1e-14:
        axis = 0.0
    else:
        axis = 0.5 * float(np.arctan2(by, bx))
        # fold into (-pi/2, pi/2]
        if axis <= -np.pi / 2:
            axis += np.pi
        elif axis > np.pi / 2:
            axis -= np.pi
    return float(common % (2.0 * np.pi)), half_ret, axis


def jones_from_decomposition(common_phase: float, half_retardance: float,
                             axis_angle: float) -> np.ndarray:
    """Inverse of :func:`circular_basis_decomposition` (linear basis)."""
    axis_vec = np.cos(2.0 * axis_angle) * _SIGMA_X + np.sin(2.0 * axis_angle) * _SIGMA_Y
    m = np.exp(1j * common_phase) * (
        np.cos(half_retardance) * np.eye(2) + 1j * np.sin(half_retardance) * axis_vec
    )
    return from_circular_basis(m)


# ---------------------------------------------------------------------------
# translation generator (small axis angle)


def translation_generator(slab: BirefringentSlab, axis_angle: float,
                          wavelength: float) -> GeneratorCoefficients:
    """Stokes coefficients of the generator of propagation through the slab.

    Valid to first order in the axis angle: the Sy coefficient is
    axis_angle * (k_e - k_o), the Sx coefficient (k_e - k_o)/2 and the S0
    coefficient (k_e + k_o)/2.  The result is flagged when |axis_angle|
    exceeds 0.1 rad.
    """
    k_e, k_o = wavenumbers(slab, wavelength)
    return GeneratorCoefficients(
        k_e=k_e,
        k_o=k_o,
        s0_coeff=0.5 * (k_e + k_o),
        sx_coeff=0.5 * (k_e - k_o),
        sy_coeff=axis_angle * (k_e - k_o),
        axis_angle=axis_angle,
        small_angle_ok=abs(axis_angle) <= SMALL_ANGLE_LIMIT,
    )


def generator_exponential_error(slab: BirefringentSlab, axis_angle: float,
                                wavelength: float) -> float:
    """Spectral-norm gap between exp(i G l / hbar) and the exact slab matrix.

    Both are formed in the circular basis; the gap is O(axis_angle^2)
    because the generator keeps only the linear-in-angle Sy term.
    """
    coeff = translation_generator(slab, axis_angle, wavelength)
    exponent = slab.length * (
        coeff.s0_coeff * np.eye(2) + coeff.sx_coeff * _SIGMA_X + coeff.sy_coeff * _SIGMA_Y
    )
    vals, vecs = np.linalg.eigh(exponent)
    approx = (vecs * np.exp(1j * vals)) @ vecs.conj().T
    exact = to_circular_basis(
        rotated_slab_jones(slab_jones(slab, wavelength), axis_angle)
    )
    return float(np.linalg.norm(approx - exact, 2))


# ---------------------------------------------------------------------------
# classical propagation


def stokes_from_amplitudes(amp_x: complex, amp_y: complex) -> np.ndarray:
    """Classical Stokes 4-vector (S0, Sx, Sy, Sz) of a polarization pair."""
    cross = np.conj(amp_x) * amp_y
    return np.array([
        abs(amp_x) ** 2 + abs(amp_y) ** 2,
        abs(amp_x) ** 2 - abs(amp_y) ** 2,
        -2.0 * cross.real,
        -2.0 * cross.imag,
    ])


def propagate_classical(probe: ProbeLight, jones: np.ndarray
                        ) -> tuple[np.ndarray, np.ndarray]:
    """Send probe amplitudes through a Jones matrix.

    Returns (output amplitudes, output Stokes 4-vector).  Raises
    ContractError if the matrix is not unitary, since the slab is lossless
    and total intensity must be conserved.
    """
    defect = unitarity_defect(jones)
    if defect > UNITARITY_TOL:
        raise ContractError(f"matrix is not unitary (defect {defect:.2e})")
    amps_in = np.array([probe.amp_x, probe.amp_y], dtype=complex)
    amps_out = np.asarray(jones, dtype=complex) @ amps_in
    return amps_out, stokes_from_amplitudes(amps_out[0], amps_out[1])
