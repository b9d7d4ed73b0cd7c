"""Linearized Gaussian model of the homodyne angular-momentum readout.

In the macroscopic regime the detected observable is a linear combination of
four quadratures — the object pair (q_O, p_O) standing in for the rescaled
transverse angular momentum, and the probe pair (q_P, p_P) carrying shot
noise:

    outcome = signal_coeff * q_O + qp_coeff * q_P + pp_coeff * p_P

with

    signal_coeff = sqrt(2) * photons * sqrt(quanta) * coupling_per_quantum
    qp_coeff     = 2 * sqrt(2 * photons) * half_retardance
    pp_coeff     = -sqrt(2 * photons)

All quadratures use vacuum variance 1/2.  States are Gaussian (mean
4-vector, 4x4 covariance), sampling is counter-based and bit-reproducible
(numpy Philox keyed by the seed), and conditioning follows the standard
Gaussian update, giving posterior Var(q_O) = prior * (1 - rho^2) with
rho^2 = SNR / (1 + SNR).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (ContractError, DegenerateConditioningError, DomainError,
                     LinearizationFloorError)

#: below these the linearized model is refused; use the exact hilbert route
PHOTON_FLOOR = 1e3
QUANTA_FLOOR = 1e3
VACUUM_VARIANCE = 0.5

_QUAD_NAMES = ("q_obj", "p_obj", "q_probe", "p_probe")


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Gaussian state of (q_O, p_O, q_P, p_P): mean vector and covariance."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self) -> None:
        mean = np.ascontiguousarray(self.mean, dtype=float)
        cov = np.ascontiguousarray(self.cov, dtype=float)
        if mean.shape != (4,) or cov.shape != (4, 4):
            raise ContractError("GaussianState needs a 4-vector mean and 4x4 cov")
        if np.abs(cov - cov.T).max() > 1e-10 * max(1.0, np.abs(cov).max()):
            raise ContractError("covariance must be symmetric")
        eigmin = float(np.linalg.eigvalsh(0.5 * (cov + cov.T)).min())
        if eigmin < -1e-10 * max(1.0, np.abs(cov).max()):
            raise ContractError(f"covariance not positive semidefinite (min eig {eigmin:.2e})")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", 0.5 * (cov + cov.T))

    @classmethod
    def vacuum(cls) -> "GaussianState":
        """All four quadratures in vacuum: zero mean, variance 1/2 each."""
        return cls(np.zeros(4), np.eye(4) * VACUUM_VARIANCE)

    @property
    def object_variance(self) -> float:
        """Var(q_O) — the quantity the measurement is meant to pin down."""
        return float(self.cov[0, 0])


@dataclass(frozen=True)
class OutputObservable:
    """Coefficients of the detected linear combination of quadratures."""

    signal_coeff: float
    qp_coeff: float
    pp_coeff: float

    @property
    def coefficients(self) -> np.ndarray:
        """Weights on (q_O, p_O, q_P, p_P)."""
        return np.array([self.signal_coeff, 0.0, self.qp_coeff, self.pp_coeff])

    @property
    def noise_coefficients(self) -> np.ndarray:
        """Same weights with the signal switched off (shot-noise channel)."""
        return np.array([0.0, 0.0, self.qp_coeff, self.pp_coeff])


def _check_floors(photons: float, quanta: float) -> None:
    if photons < PHOTON_FLOOR or quanta < QUANTA_FLOOR:
        raise LinearizationFloorError(
            f"photons={photons:.3g}, quanta={quanta:.3g} below the linearized-"
            f"model floors ({PHOTON_FLOOR:.0e}, {QUANTA_FLOOR:.0e}); use the "
            "exact hilbert route for small systems"
        )


def output_observable(params, photons: float) -> OutputObservable:
    """Detected-observable coefficients for one pass at ``photons`` mean
    probe photons; ``params`` carries half_retardance, coupling_per_quantum
    and quanta (rigid_top.InteractionParams)."""
    _check_floors(photons, params.quanta)
    root_n = np.sqrt(photons)
    return OutputObservable(
        signal_coeff=float(np.sqrt(2.0) * photons * np.sqrt(params.quanta)
                           * params.coupling_per_quantum),
        qp_coeff=float(2.0 * np.sqrt(2.0) * root_n * params.half_retardance),
        pp_coeff=float(-np.sqrt(2.0) * root_n),
    )


# ---------------------------------------------------------------------------
# SNR


def snr(photons: float, quanta: float, half_retardance: float) -> float:
    """Signal-to-noise of a single pass with vacuum variances.

    signal^2 Var(q_O) / (qp^2 Var(q_P) + pp^2 Var(p_P)), which reduces to
    4 n theta^2 / (N (4 theta^2 + 1)).
    """
    _check_floors(photons, quanta)
    if half_retardance == 0.0:
        return 0.0
    t2 = half_retardance * half_retardance
    return 4.0 * photons * t2 / (quanta * (4.0 * t2 + 1.0))


def solve_photon_number(target_snr: float, quanta: float,
                        half_retardance: float) -> float:
    """Photon number at which :func:`snr` reaches ``target_snr`` (exact
    inversion; snr(solve(t)) == t to 1e-12)."""
    if target_snr <= 0.0:
        raise DomainError(f"target SNR must be positive, got {target_snr}")
    if half_retardance == 0.0:
        raise DomainError("half_retardance = 0 carries no signal at any power")
    if quanta < QUANTA_FLOOR:
        raise LinearizationFloorError(
            f"quanta={quanta:.3g} below the linearized-model floor {QUANTA_FLOOR:.0e}"
        )
    t2 = half_retardance * half_retardance
    return target_snr * quanta * (4.0 * t2 + 1.0) / (4.0 * t2)


def snr_from_state(obs: OutputObservable, state: GaussianState) -> float:
    """SNR generalized to an arbitrary Gaussian state (signal power over
    shot-noise power in the outcome)."""
    c_sig = np.array([obs.signal_coeff, 0.0, 0.0, 0.0])
    sig = float(c_sig @ state.cov @ c_sig)
    c_noise = obs.noise_coefficients
    noise = float(c_noise @ state.cov @ c_noise)
    if noise <= 0.0:
        raise DegenerateConditioningError("zero shot-noise power in the outcome")
    return sig / noise


# ---------------------------------------------------------------------------
# sampling


@dataclass(frozen=True, eq=False)
class MeasurementRecord:
    """Shot-noise Monte Carlo record.

    With ``fresh_object`` False (the QND setting) one object realization is
    drawn once and all shots probe it with fresh probe noise; the truth is
    kept in ``object_qo``.  With ``fresh_object`` True every shot draws an
    independent object as well (pure sampling of the marginal outcome law).
    """

    outcomes: np.ndarray
    seed: int
    fresh_object: bool
    object_qo: float
    conditional_mean: float
    conditional_variance: float
    marginal_mean: float
    marginal_variance: float


def outcome_statistics(obs: OutputObservable, state: GaussianState
                       ) -> tuple[float, float, float]:
    """(mean, marginal variance, shot-noise-only variance) of the outcome."""
    c = obs.coefficients
    mean = float(c @ state.mean)
    marginal = float(c @ state.cov @ c)
    c_noise = obs.noise_coefficients
    noise_only = float(c_noise @ state.cov @ c_noise)
    return mean, marginal, noise_only


def sample_shots(obs: OutputObservable, state: GaussianState, shots: int,
                 seed: int, fresh_object: bool = False) -> MeasurementRecord:
    """Draw measurement outcomes from the exact Gaussian law.

    Deterministic for a given seed (counter-based Philox streams), so records
    are bit-reproducible across runs and platforms.
    """
    if shots < 1:
        raise DomainError(f"shots must be >= 1, got {shots}")
    rng = np.random.Generator(np.random.Philox(key=int(seed)))
    mean, marginal_var, noise_var = outcome_statistics(obs, state)

    if fresh_object:
        samples = rng.multivariate_normal(state.mean, state.cov, size=shots,
                                          method="cholesky")
        outcomes = samples @ obs.coefficients
        return MeasurementRecord(
            outcomes=outcomes, seed=int(seed), fresh_object=True,
            object_qo=float("nan"),
            conditional_mean=mean, conditional_variance=marginal_var,
            marginal_mean=mean, marginal_variance=marginal_var,
        )

    # one object realization, conditional probe draws per shot
    mean_o, mean_p = state.mean[:2], state.mean[2:]
    cov_oo, cov_op = state.cov[:2, :2], state.cov[:2, 2:]
    cov_pp = state.cov[2:, 2:]
    obj = rng.multivariate_normal(mean_o, cov_oo, method="cholesky")
    gain = np.linalg.solve(cov_oo + 1e-300 * np.eye(2), cov_op).T
    probe_mean = mean_p + gain @ (obj - mean_o)
    probe_cov = cov_pp - gain @ cov_op
    probe = rng.multivariate_normal(probe_mean, 0.5 * (probe_cov + probe_cov.T),
                                    size=shots, method="cholesky")
    c = obs.coefficients
    outcomes = c[:2] @ obj + probe @ c[2:]
    cond_mean = float(c[:2] @ obj + c[2:] @ probe_mean)
    cond_var = float(c[2:] @ probe_cov @ c[2:])
    return MeasurementRecord(
        outcomes=outcomes, seed=int(seed), fresh_object=False,
        object_qo=float(obj[0]),
        conditional_mean=cond_mean, conditional_variance=cond_var,
        marginal_mean=mean, marginal_variance=marginal_var,
    )


# ---------------------------------------------------------------------------
# conditioning


def conditional_update(prior: GaussianState, obs: OutputObservable,
                       outcome: float) -> GaussianState:
    """Condition the Gaussian state on one observed outcome.

    Standard update: with y = c.x, S = c'Sigma c, the posterior is
    mean + Sigma c (y - c.mean)/S and Sigma - Sigma c c' Sigma / S.  The
    posterior Var(q_O) never exceeds the prior, with equality iff the signal
    coefficient vanishes.
    """
    c = obs.coefficients
    s = float(c @ prior.cov @ c)
    if s <= 0.0 or not np.isfinite(s):
        raise DegenerateConditioningError(
            f"outcome variance {s!r} is not positive; nothing to condition on"
        )
    gain = prior.cov @ c / s
    mean = prior.mean + gain * (outcome - float(c @ prior.mean))
    cov = prior.cov - np.outer(gain, c @ prior.cov)
    return GaussianState(mean, cov)


def refresh_probe(state: GaussianState) -> GaussianState:
    """Keep the object marginal, load a fresh vacuum probe (new pulse)."""
    mean = state.mean.copy()
    mean[2:] = 0.0
    cov = np.eye(4) * VACUUM_VARIANCE
    cov[:2, :2] = state.cov[:2, :2]
    return GaussianState(mean, cov)


def object_twist_shear(state: GaussianState, shear: float) -> GaussianState:
    """Symplectic shear p_O <- p_O + shear * q_O of the object block.

    Hook for self-twisting between pulses; the pulse-sequence helper ships
    with it disabled (shear=None).
    """
    m = np.eye(4)
    m[1, 0] = shear
    return GaussianState(m @ state.mean, m @ state.cov @ m.T)


def pulse_sequence(obs: OutputObservable, prior: GaussianState, pulses: int,
                   outcomes=None, seed: int | None = None,
                   shear: float | None = None) -> list[GaussianState]:
    """Posterior after each of ``pulses`` probe pulses on one object.

    Outcomes may be given explicitly; otherwise a persistent object truth is
    simulated from ``seed``.  Covariances are outcome-independent, so
    posterior precision grows linearly in the pulse count either way.  The
    ``shear`` hook (disabled by default) applies the object twist between
    pulses.
    """
    if pulses < 1:
        raise DomainError(f"pulses must be >= 1, got {pulses}")
    if outcomes is None:
        if seed is None:
            raise ContractError("either outcomes or a seed must be provided")
        rng = np.random.Generator(np.random.Philox(key=int(seed)))
        truth = rng.multivariate_normal(prior.mean[:2], prior.cov[:2, :2],
                                        method="cholesky")
        noise_sd = np.sqrt(float(obs.noise_coefficients @ (np.eye(4) * VACUUM_VARIANCE)
                                 @ obs.noise_coefficients))
        outcomes = (obs.coefficients[:2] @ truth
                    + noise_sd * rng.standard_normal(pulses))
    outcomes = np.asarray(outcomes, dtype=float)
    if outcomes.shape != (pulses,):
        raise ContractError(f"need {pulses} outcomes, got shape {outcomes.shape}")

    state = prior
    posteriors: list[GaussianState] = []
    for k in range(pulses):
        state = conditional_update(state, obs, float(outcomes[k]))
        posteriors.append(state)
        if k + 1 < pulses:
            state = refresh_probe(state)
            if shear is not None:
                state = object_twist_shear(state, shear)
    return posteriors
