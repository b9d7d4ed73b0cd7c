"""Exact truncated-Hilbert-space model of the probe/spin interaction.

Two truncated spaces are used: a two-mode Fock space for the probe
polarization modes (per-mode cutoff ``n_max``) and a spin-j space standing in
for the macroscopic angular momentum.  The joint evolution for one probe
pass is

    B = exp(i * half_retardance * Sx (x) 1
            + i * coupling * Sy (x) Ly
            - i * twist_phase * 1 (x) Ly^2)

All Stokes operators are built literally from the circular-basis mode pair
a_plus = (a_x + i a_y)/sqrt(2), a_minus = (a_x - i a_y)/sqrt(2):

    S0 = a+^ a+ + a-^ a-      Sx = a+^ a- + a-^ a+
    Sy = -i (a+^ a- - a-^ a+) Sz = a+^ a+ - a-^ a-

which satisfy [Sx, Sy] = 2i Sz (cyclically) on truncation-safe states.
Matrix exponentials go through Hermitian eigendecomposition, so unitarity
holds to machine precision and the spectrum is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import lgamma

import numpy as np
from scipy.linalg import eigh

from .errors import ContractError, DomainError, ResourceLimitError, TruncationError

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10
#: per-mode mean-photon budget |amp|^2 <= n_max / 4 keeps the truncated tail tiny
COHERENT_TAIL_TOL = 1e-8
#: default probe amplitude for linearization checks; 0.01 mean photons keeps
#: the tail deficit ~4e-10 even at n_max = 3 and concentrates the state on
#: total-photon-number sectors where the truncated Stokes algebra is exact
DEFAULT_PROBE_AMPLITUDE = 0.1
DEFAULT_DIM_CAP = 4096


# ---------------------------------------------------------------------------
# spaces, operators, states


@dataclass(frozen=True)
class HilbertSpace:
    """Tagged truncated Hilbert space.

    kind is "two_mode_fock" (dim (n_max+1)^2), "spin" (dim 2j+1) or
    "tensor" (photon space times spin space).  Spaces compare by value, so
    operators built independently on equal spaces compose freely.
    """

    kind: str
    dim: int
    n_max: int | None = None
    j: float | None = None


def two_mode_fock_space(n_max: int) -> HilbertSpace:
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    return HilbertSpace(kind="two_mode_fock", dim=(n_max + 1) ** 2, n_max=int(n_max))


def spin_space(j: float) -> HilbertSpace:
    if j <= 0 or round(2 * j) != 2 * j:
        raise DomainError(f"j must be a positive half-integer, got {j}")
    return HilbertSpace(kind="spin", dim=int(round(2 * j + 1)), j=float(j))


def tensor_space(photon: HilbertSpace, spin: HilbertSpace) -> HilbertSpace:
    if photon.kind != "two_mode_fock" or spin.kind != "spin":
        raise ContractError("tensor space requires a two_mode_fock and a spin factor")
    return HilbertSpace(kind="tensor", dim=photon.dim * spin.dim,
                        n_max=photon.n_max, j=spin.j)


@dataclass(frozen=True, eq=False)
class QuantumOperator:
    """Matrix with its space tag; hermiticity is checked at construction."""

    space: HilbertSpace
    matrix: np.ndarray
    hermitian: bool = field(init=False)

    def __post_init__(self) -> None:
        m = np.ascontiguousarray(self.matrix, dtype=complex)
        if m.shape != (self.space.dim, self.space.dim):
            raise ContractError(
                f"matrix shape {m.shape} does not match space dim {self.space.dim}"
            )
        object.__setattr__(self, "matrix", m)
        scale = max(1.0, float(np.abs(m).max()))
        herm = bool(np.abs(m - m.conj().T).max() <= HERMITIAN_TOL * scale)
        object.__setattr__(self, "hermitian", herm)

    def dagger(self) -> "QuantumOperator":
        return QuantumOperator(self.space, self.matrix.conj().T)

    def unitarity_defect(self) -> float:
        """Spectral-norm distance of O^dag O from the identity."""
        eye = np.eye(self.space.dim)
        return float(np.linalg.norm(self.matrix.conj().T @ self.matrix - eye, 2))

    def __matmul__(self, other: "QuantumOperator") -> "QuantumOperator":
        _require_same_space(self.space, other.space)
        return QuantumOperator(self.space, self.matrix @ other.matrix)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Unit-norm state on a tagged space."""

    space: HilbertSpace
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        v = np.ascontiguousarray(self.amplitudes, dtype=complex)
        if v.shape != (self.space.dim,):
            raise ContractError(
                f"amplitude shape {v.shape} does not match space dim {self.space.dim}"
            )
        norm = float(np.linalg.norm(v))
        if abs(norm - 1.0) > 1e-12:
            raise ContractError(f"state norm {norm!r} is not 1 to 1e-12; "
                                "use StateVector.normalized")
        object.__setattr__(self, "amplitudes", v)

    @classmethod
    def normalized(cls, space: HilbertSpace, amplitudes) -> "StateVector":
        v = np.asarray(amplitudes, dtype=complex)
        norm = np.linalg.norm(v)
        if norm == 0.0:
            raise ContractError("cannot normalize the zero vector")
        return cls(space, v / norm)


def _require_same_space(a: HilbertSpace, b: HilbertSpace) -> None:
    if a != b:
        raise ContractError(f"space mismatch: {a} vs {b}")


def expectation(op: QuantumOperator, state: StateVector) -> complex:
    _require_same_space(op.space, state.space)
    return complex(np.vdot(state.amplitudes, op.matrix @ state.amplitudes))


def variance(op: QuantumOperator, state: StateVector) -> float:
    """Variance of a Hermitian operator in a pure state."""
    if not op.hermitian:
        raise ContractError("variance requires a Hermitian operator")
    mean = expectation(op, state).real
    second = expectation(op @ op, state).real
    return second - mean * mean


# ---------------------------------------------------------------------------
# photon sector


def _ladder(n_max: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_max + 1)), k=1).astype(complex)


def two_mode_ladders(space: HilbertSpace) -> tuple[QuantumOperator, QuantumOperator]:
    """Truncated lowering operators (a_x, a_y); basis index is
    n_x * (n_max + 1) + n_y."""
    if space.kind != "two_mode_fock":
        raise ContractError("two_mode_ladders needs a two_mode_fock space")
    low = _ladder(space.n_max)
    eye = np.eye(space.n_max + 1)
    return (QuantumOperator(space, np.kron(low, eye)),
            QuantumOperator(space, np.kron(eye, low)))


def stokes_operators(space: HilbertSpace) -> tuple[QuantumOperator, ...]:
    """(S0, Sx, Sy, Sz) built from the circular mode pair.

    On the x/y modes this works out to S0 = n_x + n_y, Sx = n_x - n_y,
    Sy = -(ax^ ay + ay^ ax), Sz = i (ax^ ay - ay^ ax); the commutators
    [Si, Sj] = 2i eps_ijk Sk hold exactly on truncation-safe states.
    """
    a_x, a_y = two_mode_ladders(space)
    a_p = QuantumOperator(space, (a_x.matrix + 1j * a_y.matrix) / np.sqrt(2.0))
    a_m = QuantumOperator(space, (a_x.matrix - 1j * a_y.matrix) / np.sqrt(2.0))
    pp = a_p.dagger().matrix @ a_p.matrix
    mm = a_m.dagger().matrix @ a_m.matrix
    pm = a_p.dagger().matrix @ a_m.matrix
    mp = a_m.dagger().matrix @ a_p.matrix
    return (QuantumOperator(space, pp + mm),
            QuantumOperator(space, pm + mp),
            QuantumOperator(space, -1j * (pm - mp)),
            QuantumOperator(space, pp - mm))


def truncation_safe_projector(space: HilbertSpace) -> QuantumOperator:
    """Projector onto per-mode occupations <= n_max - 1, where the truncated
    Stokes algebra is indistinguishable from the untruncated one."""
    if space.kind != "two_mode_fock":
        raise ContractError("truncation_safe_projector needs a two_mode_fock space")
    n = space.n_max
    occ = np.arange(n + 1)
    keep_x = occ <= n - 1
    mask = np.kron(keep_x, keep_x).astype(float)
    return QuantumOperator(space, np.diag(mask).astype(complex))


def coherent_polarization_state(amp_x: complex, amp_y: complex,
                                n_max: int) -> StateVector:
    """Truncated two-mode coherent state |amp_x> (x) |amp_y>, renormalized.

    Requires |amp_x|^2 + |amp_y|^2 <= n_max / 4 and a truncation-induced
    norm deficit below 1e-8 (TruncationError otherwise).
    """
    space = two_mode_fock_space(n_max)
    total = abs(amp_x) ** 2 + abs(amp_y) ** 2
    if total > n_max / 4.0:
        raise TruncationError(
            f"mean photon number {total:.3g} exceeds the truncation budget "
            f"n_max/4 = {n_max / 4.0:.3g}"
        )

    def single(amp: complex) -> np.ndarray:
        n = np.arange(n_max + 1)
        log_fact = np.array([lgamma(k + 1.0) for k in n])
        mag = np.exp(-abs(amp) ** 2 / 2.0 + n * np.log(abs(amp)) - 0.5 * log_fact) \
            if amp != 0 else np.where(n == 0, 1.0, 0.0)
        phase = np.exp(1j * n * np.angle(amp)) if amp != 0 else np.ones_like(n, dtype=complex)
        return mag * phase

    joint = np.kron(single(amp_x), single(amp_y))
    deficit = 1.0 - float(np.vdot(joint, joint).real)
    if deficit >= COHERENT_TAIL_TOL:
        raise TruncationError(
            f"truncated-tail norm deficit {deficit:.3e} >= {COHERENT_TAIL_TOL:.0e}; "
            "raise n_max or lower the amplitudes"
        )
    return StateVector.normalized(space, joint)


# ---------------------------------------------------------------------------
# spin sector


def spin_operators(j: float) -> tuple[QuantumOperator, ...]:
    """(Lx, Ly, Lz, L^2) for spin j; basis ordered m = +j ... -j.

    [Lx, Ly] = i Lz holds exactly (the spin space needs no truncation); the
    last entry is the Casimir j(j+1) * identity.
    """
    space = spin_space(j)
    m = space.j - np.arange(space.dim)          # +j ... -j
    lz = np.diag(m).astype(complex)
    # <m+1| L+ |m> = sqrt(j(j+1) - m(m+1)); with descending order the raised
    # state sits one row above
    raise_elems = np.sqrt(space.j * (space.j + 1.0) - m[1:] * (m[1:] + 1.0))
    l_plus = np.zeros((space.dim, space.dim), dtype=complex)
    l_plus[np.arange(space.dim - 1), np.arange(1, space.dim)] = raise_elems
    l_minus = l_plus.conj().T
    lx = 0.5 * (l_plus + l_minus)
    ly = (l_plus - l_minus) / 2j
    casimir = space.j * (space.j + 1.0) * np.eye(space.dim, dtype=complex)
    return (QuantumOperator(space, lx), QuantumOperator(space, ly),
            QuantumOperator(space, lz), QuantumOperator(space, casimir))


def _expm_i(h: np.ndarray) -> np.ndarray:
    """exp(i h) for Hermitian h via eigendecomposition (exactly unitary)."""
    vals, vecs = eigh(h)
    return (vecs * np.exp(1j * vals)) @ vecs.conj().T


def css_along_x(j: float) -> StateVector:
    """Coherent spin state with <Lx> = j: the +j eigenstate of Lx.

    Built by rotating the top Lz eigenstate by pi/2 about y, which gives
    the conventional all-positive amplitudes; <Lx> = j and the transverse
    variances are Var(Ly) = Var(Lz) = j/2.
    """
    _, ly, _, _ = spin_operators(j)
    space = ly.space
    top = np.zeros(space.dim, dtype=complex)
    top[0] = 1.0
    rot = _expm_i(-(np.pi / 2.0) * ly.matrix)
    return StateVector.normalized(space, rot @ top)


# ---------------------------------------------------------------------------
# joint evolution


def lift_photon(op: QuantumOperator, spin: HilbertSpace) -> QuantumOperator:
    """Embed a photon-sector operator in the photon (x) spin tensor space."""
    if op.space.kind != "two_mode_fock" or spin.kind != "spin":
        raise ContractError("lift_photon needs a photon operator and a spin space")
    joint = tensor_space(op.space, spin)
    return QuantumOperator(joint, np.kron(op.matrix, np.eye(spin.dim)))


def lift_spin(op: QuantumOperator, photon: HilbertSpace) -> QuantumOperator:
    """Embed a spin-sector operator in the photon (x) spin tensor space."""
    if op.space.kind != "spin" or photon.kind != "two_mode_fock":
        raise ContractError("lift_spin needs a spin operator and a photon space")
    joint = tensor_space(photon, op.space)
    return QuantumOperator(joint, np.kron(np.eye(photon.dim), op.matrix))


def product_state(photon: StateVector, spin: StateVector) -> StateVector:
    joint = tensor_space(photon.space, spin.space)
    return StateVector(joint, np.kron(photon.amplitudes, spin.amplitudes))


def evolution_operator(params, n_max: int, j: float,
                       dim_cap: int = DEFAULT_DIM_CAP) -> QuantumOperator:
    """Unitary for one probe pass on the photon (x) spin space.

    ``params`` provides half_retardance, coupling_per_quantum and
    twist_phase (see rigid_top.InteractionParams / simulation_params).
    Raises ResourceLimitError when (n_max+1)^2 (2j+1) exceeds ``dim_cap``.
    The result commutes with 1 (x) Ly exactly: Ly is a conserved readout
    variable of the pass.
    """
    photon = two_mode_fock_space(n_max)
    spin = spin_space(j)
    dim = photon.dim * spin.dim
    if dim > dim_cap:
        raise ResourceLimitError(
            f"joint dimension {dim} exceeds the cap {dim_cap}; lower n_max/j "
            "or raise the cap"
        )
    _, sx, sy, _ = stokes_operators(photon)
    _, ly, _, _ = spin_operators(j)
    eye_spin = np.eye(spin.dim)
    eye_ph = np.eye(photon.dim)
    exponent = (params.half_retardance * np.kron(sx.matrix, eye_spin)
                + params.coupling_per_quantum * np.kron(sy.matrix, ly.matrix)
                - params.twist_phase * np.kron(eye_ph, ly.matrix @ ly.matrix))
    unitary = QuantumOperator(tensor_space(photon, spin), _expm_i(exponent))
    defect = unitary.unitarity_defect()
    if defect > UNITARY_TOL:
        raise ContractError(f"evolution unitarity defect {defect:.2e} > {UNITARY_TOL:.0e}")
    return unitary


def heisenberg_map(evolution: QuantumOperator, op: QuantumOperator) -> QuantumOperator:
    """B^dag O B — the operator after one pass."""
    _require_same_space(evolution.space, op.space)
    return QuantumOperator(op.space,
                           evolution.matrix.conj().T @ op.matrix @ evolution.matrix)


def qnd_commutator_norm(evolution: QuantumOperator, op: QuantumOperator) -> float:
    """Spectral norm of [op, B]; zero (to tolerance) for a QND variable."""
    _require_same_space(evolution.space, op.space)
    comm = op.matrix @ evolution.matrix - evolution.matrix @ op.matrix
    return float(np.linalg.norm(comm, 2))


# ---------------------------------------------------------------------------
# linearized Stokes map


def stokes_evolution_matrix(theta: float, coupling: float, ly_mean: float,
                            ly_second_moment: float | None = None,
                            form: str = "consistent") -> np.ndarray:
    """3x3 map of (Sx, Sy, Sz) expectations for one pass.

    form="consistent" is the full second-order expansion of the exact
    conjugation (diagonal 1 - 2 coupling^2 <Ly^2>, 1 - 2 theta^2,
    1 - 2 theta^2 - 2 coupling^2 <Ly^2>); form="paper" reproduces the
    looser printed variant (diagonal 1 + theta^2, 1 - theta^2, 1) whose
    off-diagonal responses are still first-order correct.
    """
    t, tp, m = theta, coupling, ly_mean
    if form == "paper":
        return np.array([
            [1.0 + t * t, 2.0 * t * tp * m, -2.0 * tp * m],
            [2.0 * t * tp * m, 1.0 - t * t, 2.0 * t],
            [2.0 * tp * m, -2.0 * t, 1.0],
        ])
    if form == "consistent":
        m2 = ly_mean * ly_mean if ly_second_moment is None else ly_second_moment
        return np.array([
            [1.0 - 2.0 * tp * tp * m2, 2.0 * t * tp * m, -2.0 * tp * m],
            [2.0 * t * tp * m, 1.0 - 2.0 * t * t, 2.0 * t],
            [2.0 * tp * m, -2.0 * t, 1.0 - 2.0 * t * t - 2.0 * tp * tp * m2],
        ])
    raise ContractError(f"unknown matrix form {form!r}")


@dataclass(frozen=True, eq=False)
class LinearizationReport:
    """Exact vs linearized Stokes expectations after one pass."""

    theta: float
    coupling: float
    exact: np.ndarray
    predicted: np.ndarray

    @property
    def deviations(self) -> np.ndarray:
        return np.abs(self.exact - self.predicted)


def linearized_comparison(params, n_max: int, j: float,
                          probe: StateVector | None = None,
                          spin_state: StateVector | None = None,
                          form: str = "consistent") -> LinearizationReport:
    """Compare exact <B^dag Si B> with the 3x3 linearized map.

    Defaults: weak x-polarized coherent probe (DEFAULT_PROBE_AMPLITUDE) and a
    coherent spin state along x.  Spin moments (<Ly>, and <Ly^2> for the
    consistent form) are taken in the spin state; the twist phase drops out
    of the Stokes sector exactly and is ignored by the prediction.
    """
    photon = two_mode_fock_space(n_max)
    if probe is None:
        probe = coherent_polarization_state(DEFAULT_PROBE_AMPLITUDE, 0.0, n_max)
    if spin_state is None:
        spin_state = css_along_x(j)
    _require_same_space(probe.space, photon)

    _, sx, sy, sz = stokes_operators(photon)
    _, ly, _, _ = spin_operators(j)
    ly_mean = expectation(ly, spin_state).real
    ly_m2 = expectation(ly @ ly, spin_state).real

    stokes_in = np.array([expectation(op, probe).real for op in (sx, sy, sz)])
    matrix = stokes_evolution_matrix(params.half_retardance,
                                     params.coupling_per_quantum,
                                     ly_mean, ly_m2, form=form)
    predicted = matrix @ stokes_in

    joint = product_state(probe, spin_state)
    unitary = evolution_operator(params, n_max, j)
    exact = np.array([
        expectation(heisenberg_map(unitary, lift_photon(op, ly.space)), joint).real
        for op in (sx, sy, sz)
    ])
    return LinearizationReport(theta=params.half_retardance,
                               coupling=params.coupling_per_quantum,
                               exact=exact, predicted=predicted)


def linearization_convergence_order(thetas, j: float, n_max: int,
                                    form: str = "consistent") -> float:
    """Fitted log-log slope of the summed deviation as theta is scaled with
    coupling = 2 theta / (2 j) held proportional."""
    from .rigid_top import simulation_params

    thetas = np.asarray(thetas, dtype=float)
    devs = []
    for theta in thetas:
        report = linearized_comparison(simulation_params(theta, j), n_max, j,
                                       form=form)
        devs.append(report.deviations.sum())
    slope, _ = np.polyfit(np.log(thetas), np.log(devs), 1)
    return float(slope)


# ---------------------------------------------------------------------------
# one-axis twisting

def twisted_css(twist: float, j: float) -> StateVector:
    """exp(-i twist Ly^2) applied to the coherent spin state along x."""
    _, ly, _, _ = spin_operators(j)
    css = css_along_x(j)
    unitary = _expm_i(-twist * (ly.matrix @ ly.matrix))
    return StateVector.normalized(ly.space, unitary @ css.amplitudes)


def twist_squeezing(twist: float, j: float) -> tuple[float, float]:
    """Minimum spin variance in the Y-Z plane after one-axis twisting.

    Scans the direction cos(a) Ly + sin(a) Lz over the plane (the sinusoidal
    variance profile is minimized in closed form, equivalent to an infinitely
    fine scan) and returns (min variance, optimal angle in [0, pi)).
    At twist = 0 the result is the coherent value j/2.
    """
    state = twisted_css(twist, j)
    _, ly, lz, _ = spin_operators(j)
    mean_y = expectation(ly, state).real
    mean_z = expectation(lz, state).real
    cov_yy = expectation(ly @ ly, state).real - mean_y ** 2
    cov_zz = expectation(lz @ lz, state).real - mean_z ** 2
    sym = 0.5 * (ly.matrix @ lz.matrix + lz.matrix @ ly.matrix)
    cov_yz = (expectation(QuantumOperator(ly.space, sym), state).real
              - mean_y * mean_z)
    half_sum = 0.5 * (cov_yy + cov_zz)
    half_diff = 0.5 * (cov_yy - cov_zz)
    amp = float(np.hypot(half_diff, cov_yz))
    min_var = half_sum - amp
    angle = 0.5 * float(np.arctan2(-cov_yz, -half_diff)) if amp > 0 else 0.0
    if angle < 0.0:
        angle += np.pi
    return float(min_var), angle


def quartic_moment_defect(j: float) -> float:
    """Relative excess of <Ly^4> on the CSS over the Gaussian value 3 Var^2.

    A canonical (bosonic) conjugate pair would give exactly 3 Var^2; the
    spin-j defect is 1/(3j), quantifying the 1/j approach of Ly/<Lx> to a
    true canonical coordinate.
    """
    state = css_along_x(j)
    _, ly, _, _ = spin_operators(j)
    ly2 = ly @ ly
    var = expectation(ly2, state).real
    fourth = expectation(ly2 @ ly2, state).real
    return abs(fourth / (3.0 * var * var) - 1.0)


# ---------------------------------------------------------------------------
# debugging dumps


def dump_operator_csv(op: QuantumOperator, path) -> None:
    """Write a matrix as CSV rows with real/imag columns interleaved."""
    from .tableio import format_float, write_rows

    header = ["row"]
    for col in range(op.space.dim):
        header += [f"re{col}", f"im{col}"]
    rows = []
    for r in range(op.space.dim):
        row = [str(r)]
        for col in range(op.space.dim):
            row += [format_float(op.matrix[r, col].real),
                    format_float(op.matrix[r, col].imag)]
        rows.append(row)
    write_rows(path, header, rows)


def dump_state_csv(state: StateVector, path) -> None:
    """Write amplitudes as (index, re, im) CSV rows."""
    from .tableio import format_float, write_rows

    rows = [[str(i), format_float(a.real), format_float(a.imag)]
            for i, a in enumerate(state.amplitudes)]
    write_rows(path, ["index", "re", "im"], rows)
