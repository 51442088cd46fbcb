"""Dark evolution under sequential negative-result measurements.

Discrete runs apply the map ``psi -> (1 - |f_n><f_n|) exp(-i H tau) psi`` at
times ``n tau`` and keep the raw sub-normalized state, whose squared norm is
the probability that every measurement so far answered "No".  In the
frequent-measurement limit the dynamics becomes a Schroedinger equation with
the Hermitian effective Hamiltonian

    H_D(t) = P H P + i (|fdot><f| - |f><fdot|),    P = 1 - |f><f|,

which preserves both the norm and the orthogonality ``<f(t)|psi(t)> = 0``.
Continuous runs integrate it with the exponential-midpoint scheme
``psi(t+dt) = exp(-i H_D(t+dt/2) dt) psi(t)``: exactly unitary per step,
second order in ``dt``.  When the monitored state is rotated by a generator
K that commutes with H, the co-moving effective Hamiltonian is time
independent and the run has a closed-form spectral solution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import (
    CommutatorError,
    InputError,
    OrthogonalityError,
    UnsupportedVariantError,
)
from .linalg import (
    as_state,
    hermitian_eigendecomposition,
    require_hermitian,
    require_unit,
)
from .paths import GeneratorPath, ModePath, MonitoredPath
from .tolerances import DEFAULT, ToleranceProfile
from .trajectory import DarkTrajectory

__all__ = [
    "ZenoSpectrum",
    "ThreeLevelFrequencies",
    "discrete_dark_step",
    "discrete_dark_run",
    "effective_hamiltonian",
    "continuous_dark_run",
    "comoving_hamiltonian",
    "zeno_spectrum",
    "three_level_frequencies",
    "closed_form_solution",
    "closed_form_run",
    "cyclic_return_fidelity",
]


def _check_step_count(T: float, dt: float) -> int:
    if dt <= 0.0 or T <= 0.0:
        raise InputError("duration and step must be positive")
    steps = int(round(T / dt))
    if steps < 1:
        raise InputError(f"duration {T} shorter than one step {dt}")
    return steps


def discrete_dark_step(psi, f_next, H, tau: float, tol: ToleranceProfile = DEFAULT) -> np.ndarray:
    """One measurement step: free evolution for ``tau``, then projection.

    Returns the raw, unnormalized ``(1 - |f><f|) exp(-i H tau) psi``; its
    norm never exceeds the input norm.
    """
    psi = as_state(psi)
    sq = float(np.linalg.norm(psi)) ** 2
    if sq > 1.0 + tol.state_norm_cap:
        raise InputError(f"state squared norm {sq:.12g} exceeds 1")
    f = require_unit(f_next, tol, name="monitored state")
    H = require_hermitian(H, tol, name="hamiltonian")
    if tau <= 0.0:
        raise InputError("measurement interval must be positive")
    dec = hermitian_eigendecomposition(H, tol)
    v = dec.eigenvectors
    evolved = v @ (np.exp(-1j * dec.eigenvalues * tau) * (v.conj().T @ psi))
    return evolved - np.vdot(f, evolved) * f


def discrete_dark_run(
    psi0,
    path: MonitoredPath,
    H,
    tau: float,
    M: int,
    tol: ToleranceProfile = DEFAULT,
) -> DarkTrajectory:
    """Run ``M`` measurement steps with the monitored state sampled at ``n tau``.

    The initial state must be orthogonal to the first measured state
    ``f(tau)``; states orthogonal to ``f(0)`` pass as well, up to the drift
    the path accumulates over a single step.

    Raises
    ------
    OrthogonalityError
        If the initial state has a component on ``f(tau)`` beyond the setup
        tolerance plus the one-step drift allowance.
    """
    psi0 = require_unit(psi0, tol, name="initial state")
    H = require_hermitian(H, tol, name="hamiltonian")
    if tau <= 0.0:
        raise InputError("measurement interval must be positive")
    if M < 1:
        raise InputError("need at least one measurement")

    times = tau * np.arange(M + 1)
    f_seq, fdot_seq = path.evaluate_many(times[1:])
    overlap = abs(np.vdot(f_seq[0], psi0))
    allowance = tol.setup_orthogonality + 2.0 * tau * float(np.linalg.norm(fdot_seq[0]))
    if overlap > allowance:
        raise OrthogonalityError(
            f"initial state must be orthogonal to the first monitored state: "
            f"|<f(tau)|psi0>| = {overlap:.3e} exceeds {allowance:.3e}"
        )

    dec = hermitian_eigendecomposition(H, tol)
    v = dec.eigenvectors
    U = (v * np.exp(-1j * dec.eigenvalues * tau)) @ v.conj().T
    states, norms, orth = kernels.discrete_loop(
        np.ascontiguousarray(U), np.ascontiguousarray(f_seq), psi0
    )
    return DarkTrajectory(
        times=times,
        states=states,
        norms=norms,
        survival_probability=norms**2,
        orthogonality_residual=orth,
        mode="discrete",
        step=float(tau),
    )


def effective_hamiltonian(H, f, fdot, tol: ToleranceProfile = DEFAULT) -> np.ndarray:
    """Hermitian generator of dark evolution for monitored state ``f``.

    ``H_D = P H P + i(|fdot><f| - |f><fdot|)`` with ``P = 1 - |f><f|``.
    The derivative must not drift the norm: ``Re <f|fdot>`` has to vanish
    within ``tol.path_norm_rate``.
    """
    H = require_hermitian(H, tol, name="hamiltonian")
    f = require_unit(f, tol, name="monitored state")
    fdot = as_state(fdot, f.shape[0])
    rate = float(np.real(np.vdot(f, fdot)))
    if abs(rate) > tol.path_norm_rate:
        raise InputError(
            f"monitored-state derivative drifts the norm: Re<f|fdot> = {rate:.3e}"
        )
    P = np.eye(f.shape[0], dtype=np.complex128) - np.outer(f, f.conj())
    return P @ H @ P + 1j * (np.outer(fdot, f.conj()) - np.outer(f, fdot.conj()))


def continuous_dark_run(
    psi0,
    path: MonitoredPath,
    H,
    T: float,
    dt: float,
    tol: ToleranceProfile = DEFAULT,
) -> DarkTrajectory:
    """Integrate the effective Schroedinger equation on a uniform grid.

    Exponential-midpoint propagation: each step applies the spectral
    exponential of ``H_D`` evaluated at the interval midpoint, so the norm
    is preserved to machine precision regardless of ``dt``.  The
    orthogonality residual ``|<f(t)|psi(t)>|`` is recorded as a diagnostic;
    it converges to zero as ``O(dt^2)``.

    Raises
    ------
    OrthogonalityError
        If ``<f(0)|psi0>`` exceeds the setup tolerance.
    """
    psi0 = require_unit(psi0, tol, name="initial state")
    H = require_hermitian(H, tol, name="hamiltonian")
    steps = _check_step_count(T, dt)

    times = dt * np.arange(steps + 1)
    midpoints = dt * (np.arange(steps) + 0.5)
    f_grid, _ = path.evaluate_many(times)
    f_mid, fdot_mid = path.evaluate_many(midpoints)

    overlap = abs(np.vdot(f_grid[0], psi0))
    if overlap > tol.setup_orthogonality:
        raise OrthogonalityError(
            f"initial state must be orthogonal to the monitored state: "
            f"|<f(0)|psi0>| = {overlap:.3e} exceeds {tol.setup_orthogonality:.3e}"
        )

    states, norms, orth = kernels.continuous_loop(
        np.ascontiguousarray(H),
        np.ascontiguousarray(f_grid),
        np.ascontiguousarray(f_mid),
        np.ascontiguousarray(fdot_mid),
        psi0,
        float(dt),
    )
    return DarkTrajectory(
        times=times,
        states=states,
        norms=norms,
        survival_probability=norms**2,
        orthogonality_residual=orth,
        mode="continuous",
        step=float(dt),
    )


def comoving_hamiltonian(H, K, f0, t: float, tol: ToleranceProfile = DEFAULT) -> np.ndarray:
    """Effective Hamiltonian in the frame where the monitored state rests.

    ``P(0) (exp(i K t) H exp(-i K t) - K) P(0)``; it annihilates ``f0`` from
    both sides and is time independent whenever ``[K, H] = 0``.
    """
    H = require_hermitian(H, tol, name="hamiltonian")
    K = require_hermitian(K, tol, name="path generator")
    f0 = require_unit(f0, tol, name="monitored state")
    dec = hermitian_eigendecomposition(K, tol)
    v = dec.eigenvectors
    rot = (v * np.exp(1j * dec.eigenvalues * t)) @ v.conj().T
    P0 = np.eye(f0.shape[0], dtype=np.complex128) - np.outer(f0, f0.conj())
    return P0 @ (rot @ H @ rot.conj().T - K) @ P0


def _require_commuting(H: np.ndarray, K: np.ndarray, tol: ToleranceProfile) -> None:
    comm = np.linalg.norm(K @ H - H @ K)
    bound = tol.commutator_rel * np.linalg.norm(K) * np.linalg.norm(H)
    if comm > bound:
        raise CommutatorError(
            f"generator and hamiltonian do not commute (||[K,H]|| = {comm:.3e}); "
            "no closed form exists, use continuous_dark_run for time-ordered "
            "integration"
        )


def _complement_basis(f0: np.ndarray) -> np.ndarray:
    n = f0.shape[0]
    q, _ = np.linalg.qr(np.column_stack([f0, np.eye(n, dtype=np.complex128)]))
    return q[:, 1:n]


@dataclass(frozen=True)
class ZenoSpectrum:
    """Eigensystem of the co-moving effective Hamiltonian on the complement.

    ``modes[:, k]`` spans the complement of the initial monitored state,
    ``frequencies[k]`` are the emergent eigenfrequencies (in general neither
    eigenvalues of H nor of K), and ``coefficients[k]`` expand the initial
    state over the modes.
    """

    frequencies: np.ndarray
    modes: np.ndarray
    coefficients: np.ndarray
    monitored_state: np.ndarray


def zeno_spectrum(
    H, K, f0, psi0, tol: ToleranceProfile = DEFAULT
) -> ZenoSpectrum:
    """Diagonalize ``P(0)(H - K)P(0)`` restricted to the complement of ``f0``.

    Requires ``[K, H] = 0`` (otherwise the co-moving Hamiltonian is time
    dependent and there is no static spectrum) and an initial state
    orthogonal to ``f0`` so that the expansion coefficients are complete.
    """
    H = require_hermitian(H, tol, name="hamiltonian")
    K = require_hermitian(K, tol, name="path generator")
    f0 = require_unit(f0, tol, name="monitored state")
    psi0 = require_unit(psi0, tol, name="initial state")
    _require_commuting(H, K, tol)
    overlap = abs(np.vdot(f0, psi0))
    if overlap > tol.setup_orthogonality:
        raise OrthogonalityError(
            f"initial state must be orthogonal to the monitored state: "
            f"|<f0|psi0>| = {overlap:.3e}"
        )

    B = _complement_basis(f0)
    restricted = B.conj().T @ (H - K) @ B
    restricted = 0.5 * (restricted + restricted.conj().T)
    dec = hermitian_eigendecomposition(restricted, tol)
    modes = B @ dec.eigenvectors
    # reapply the phase convention in the full space
    for k in range(modes.shape[1]):
        col = modes[:, k]
        idx = np.flatnonzero(np.abs(col) > tol.eigenvector_phase_floor)
        pivot = col[idx[0]]
        modes[:, k] = col * (pivot.conjugate() / abs(pivot))
    coefficients = modes.conj().T @ psi0
    return ZenoSpectrum(
        frequencies=dec.eigenvalues,
        modes=modes,
        coefficients=coefficients,
        monitored_state=f0,
    )


@dataclass(frozen=True)
class ThreeLevelFrequencies:
    """Closed-form spectrum of a monitored three-level system with H = 0.

    ``trace`` and ``determinant`` characterize the 2x2 restriction of
    ``P(0) K P(0)`` to the complement of the monitored state;
    ``omega_plus`` and ``omega_minus`` are its eigenvalues.
    """

    trace: float
    determinant: float
    omega_plus: float
    omega_minus: float


def three_level_frequencies(a, Omega, tol: ToleranceProfile = DEFAULT) -> ThreeLevelFrequencies:
    """Eigenfrequencies of the complement restriction for N = 3, H = 0.

    For a monitored state with amplitudes ``a_j`` over generator modes of
    frequencies ``Omega_j``, the restriction of ``P(0) K P(0)`` to the
    complement has trace ``sum Omega_j - sum |a_j|^2 Omega_j`` and
    determinant ``sum_j |a_j|^2 (product of the other two frequencies)``.
    """
    a = np.asarray(a, dtype=np.complex128)
    Omega = np.asarray(Omega, dtype=float)
    if a.shape != (3,) or Omega.shape != (3,):
        raise InputError("need exactly three amplitudes and three frequencies")
    weights = np.abs(a) ** 2
    total = float(weights.sum())
    if abs(total - 1.0) > tol.path_norm:
        raise InputError(f"amplitudes must satisfy sum |a_j|^2 = 1, got {total:.12g}")

    trace = float(Omega.sum() - weights @ Omega)
    determinant = float(
        weights[0] * Omega[1] * Omega[2]
        + weights[1] * Omega[0] * Omega[2]
        + weights[2] * Omega[0] * Omega[1]
    )
    disc = trace * trace - 4.0 * determinant
    if disc < -1e-12:
        raise InputError(
            f"inconsistent spectrum: trace^2 - 4 det = {disc:.3e} is negative"
        )
    root = float(np.sqrt(max(disc, 0.0)))
    return ThreeLevelFrequencies(
        trace=trace,
        determinant=determinant,
        omega_plus=0.5 * (trace + root),
        omega_minus=0.5 * (trace - root),
    )


def closed_form_solution(
    psi0, H, K, f0, t: float, tol: ToleranceProfile = DEFAULT
) -> np.ndarray:
    """Spectral solution ``exp(-i K t) exp(-i Htilde t) psi0`` for ``[K,H] = 0``.

    ``Htilde = P(0)(H - K)P(0)``.  Equals the mode expansion
    ``sum_k c_k exp(-i w_k t) exp(-i K t) u_k`` over the complement spectrum.
    """
    psi0 = require_unit(psi0, tol, name="initial state")
    H = require_hermitian(H, tol, name="hamiltonian")
    K = require_hermitian(K, tol, name="path generator")
    f0 = require_unit(f0, tol, name="monitored state")
    _require_commuting(H, K, tol)
    overlap = abs(np.vdot(f0, psi0))
    if overlap > tol.setup_orthogonality:
        raise OrthogonalityError(
            f"initial state must be orthogonal to the monitored state: "
            f"|<f0|psi0>| = {overlap:.3e}"
        )
    P0 = np.eye(f0.shape[0], dtype=np.complex128) - np.outer(f0, f0.conj())
    Ht = P0 @ (H - K) @ P0
    Ht = 0.5 * (Ht + Ht.conj().T)
    decH = hermitian_eigendecomposition(Ht, tol)
    decK = hermitian_eigendecomposition(K, tol)
    inner = decH.eigenvectors @ (
        np.exp(-1j * decH.eigenvalues * t) * (decH.eigenvectors.conj().T @ psi0)
    )
    return decK.eigenvectors @ (
        np.exp(-1j * decK.eigenvalues * t) * (decK.eigenvectors.conj().T @ inner)
    )


def closed_form_run(
    psi0, path: MonitoredPath, H, T: float, dt: float, tol: ToleranceProfile = DEFAULT
) -> DarkTrajectory:
    """Sample the closed-form solution on a uniform grid as a trajectory.

    The path must carry a generator (generator or mode variant) commuting
    with ``H``.
    """
    if isinstance(path, GeneratorPath):
        gen = path
    elif isinstance(path, ModePath):
        gen = path.to_generator_path()
    else:
        raise UnsupportedVariantError(
            "closed-form runs need a generator or mode path"
        )
    psi0 = require_unit(psi0, tol, name="initial state")
    H = require_hermitian(H, tol, name="hamiltonian")
    K = gen.generator
    f0 = gen.initial_state
    _require_commuting(H, K, tol)
    overlap = abs(np.vdot(f0, psi0))
    if overlap > tol.setup_orthogonality:
        raise OrthogonalityError(
            f"initial state must be orthogonal to the monitored state: "
            f"|<f0|psi0>| = {overlap:.3e}"
        )
    steps = _check_step_count(T, dt)
    times = dt * np.arange(steps + 1)

    P0 = np.eye(f0.shape[0], dtype=np.complex128) - np.outer(f0, f0.conj())
    Ht = P0 @ (H - K) @ P0
    Ht = 0.5 * (Ht + Ht.conj().T)
    decH = hermitian_eigendecomposition(Ht, tol)
    decK = hermitian_eigendecomposition(K, tol)

    inner = np.exp(-1j * np.outer(times, decH.eigenvalues)) * (
        decH.eigenvectors.conj().T @ psi0
    )
    states = inner @ decH.eigenvectors.T
    rotated = np.exp(-1j * np.outer(times, decK.eigenvalues)) * (
        states @ decK.eigenvectors.conj()
    )
    states = rotated @ decK.eigenvectors.T

    f_grid, _ = path.evaluate_many(times)
    norms = np.linalg.norm(states, axis=1)
    orth = np.abs(np.einsum("ij,ij->i", f_grid.conj(), states))
    return DarkTrajectory(
        times=times,
        states=states,
        norms=norms,
        survival_probability=norms**2,
        orthogonality_residual=orth,
        mode="continuous",
        step=float(dt),
    )


def cyclic_return_fidelity(spectrum: ZenoSpectrum, T: float | None) -> float:
    """Return fidelity ``|<psi(0)|psi(T)>|`` after one path period.

    Over a period the moving modes come back, so the overlap reduces to
    ``|sum_k |c_k|^2 exp(-i w_k T)|``: generically below one, because the
    emergent frequencies are not the path's own.
    """
    if T is None:
        raise UnsupportedVariantError("return fidelity needs a periodic path")
    weights = np.abs(spectrum.coefficients) ** 2
    value = np.abs(np.sum(weights * np.exp(-1j * spectrum.frequencies * float(T))))
    return float(min(value, 1.0))
