"""Dense complex linear algebra primitives.

Everything downstream is built on three operations: Hermitian
eigendecomposition with a deterministic phase convention, spectral unitary
exponentials ``exp(-i A t)``, and rank-(N-1) projectors ``1 - |f><f|``.
States are plain complex ndarrays; operators are square complex ndarrays in
angular-frequency units (hbar = 1).

All functions are pure and the returned arrays are freshly allocated, so
concurrent use needs no synchronization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import HermiticityError, InputError, NormalizationError
from .tolerances import DEFAULT, ToleranceProfile

__all__ = [
    "EigenDecomposition",
    "as_state",
    "as_operator",
    "require_hermitian",
    "require_unit",
    "hermitian_eigendecomposition",
    "unitary_exp",
    "projector_from_state",
]


def as_state(v, dim: int | None = None) -> np.ndarray:
    """Coerce ``v`` to a 1-D complex128 array, optionally checking its length."""
    arr = np.asarray(v, dtype=np.complex128)
    if arr.ndim != 1:
        raise InputError(f"state must be one-dimensional, got shape {arr.shape}")
    if arr.shape[0] < 2:
        raise InputError(f"state dimension must be at least 2, got {arr.shape[0]}")
    if dim is not None and arr.shape[0] != dim:
        raise InputError(f"state has dimension {arr.shape[0]}, expected {dim}")
    return arr


def as_operator(A, dim: int | None = None) -> np.ndarray:
    """Coerce ``A`` to a square complex128 matrix, optionally checking its size."""
    arr = np.asarray(A, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InputError(f"operator must be a square matrix, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise InputError(f"operator has dimension {arr.shape[0]}, expected {dim}")
    return arr


def require_hermitian(A, tol: ToleranceProfile = DEFAULT, name: str = "operator") -> np.ndarray:
    """Validate entrywise Hermiticity of ``A`` within ``tol.hermiticity``."""
    arr = as_operator(A)
    dev = np.abs(arr - arr.conj().T).max()
    if dev > tol.hermiticity:
        raise HermiticityError(
            f"{name} is not Hermitian: max |A - A^dag| = {dev:.3e} "
            f"exceeds {tol.hermiticity:.3e}"
        )
    return arr


def require_unit(v, tol: ToleranceProfile = DEFAULT, name: str = "state") -> np.ndarray:
    """Validate that ``v`` is unit-norm within ``tol.unit_state`` and renormalize.

    Inputs inside the tolerance band are renormalized exactly so that
    downstream identities (projector annihilation, spectral expansions) hold
    to machine precision rather than to the validation tolerance.
    """
    arr = as_state(v)
    nrm = float(np.linalg.norm(arr))
    if abs(nrm - 1.0) > tol.unit_state:
        raise NormalizationError(
            f"{name} must be unit-norm: ||v|| = {nrm:.12g} deviates by more "
            f"than {tol.unit_state:.3e}"
        )
    return arr / nrm


def _fix_phases(vectors: np.ndarray, floor: float) -> np.ndarray:
    """Rotate each column so its first significant component is real positive."""
    out = vectors.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        idx = np.flatnonzero(np.abs(col) > floor)
        pivot = col[idx[0]] if idx.size else col[np.argmax(np.abs(col))]
        mag = abs(pivot)
        if mag > 0.0:
            out[:, k] = col * (pivot.conjugate() / mag)
    return out


@dataclass(frozen=True)
class EigenDecomposition:
    """Orthonormal eigensystem of a Hermitian operator.

    ``eigenvalues`` are ascending; ``eigenvectors[:, k]`` is the unit
    eigenvector for ``eigenvalues[k]``, rotated so its first component with
    magnitude above the phase floor is real and positive.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        """Return ``sum_k lambda_k v_k v_k^dag``."""
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def hermitian_eigendecomposition(
    A, tol: ToleranceProfile = DEFAULT
) -> EigenDecomposition:
    """Diagonalize a Hermitian operator.

    Parameters
    ----------
    A : array_like
        Square complex matrix, Hermitian within ``tol.hermiticity``.
    tol : ToleranceProfile
        Validation thresholds.

    Returns
    -------
    EigenDecomposition
        Ascending eigenvalues and phase-fixed orthonormal eigenvectors.

    Raises
    ------
    HermiticityError
        If ``A`` deviates from Hermiticity beyond tolerance.
    """
    arr = require_hermitian(A, tol)
    w, v = np.linalg.eigh(arr)
    return EigenDecomposition(w, _fix_phases(v, tol.eigenvector_phase_floor))


def unitary_exp(A, t: float, tol: ToleranceProfile = DEFAULT) -> np.ndarray:
    """Spectral unitary exponential ``exp(-i A t)`` of a Hermitian ``A``.

    Diagonalize, exponentiate the eigenvalues, recompose.  The result is
    unitary to machine precision for any step size, which is why this is
    used instead of series or Pade approximations.
    """
    dec = hermitian_eigendecomposition(A, tol)
    v = dec.eigenvectors
    return (v * np.exp(-1j * dec.eigenvalues * t)) @ v.conj().T


def projector_from_state(f, tol: ToleranceProfile = DEFAULT) -> np.ndarray:
    """Projector ``1 - |f><f|`` onto the complement of a unit state ``f``.

    The input is validated to be unit within ``tol.unit_state`` and then
    renormalized exactly, so the returned matrix is idempotent and
    annihilates ``f`` to machine precision.
    """
    g = require_unit(f, tol, name="monitored state")
    n = g.shape[0]
    return np.eye(n, dtype=np.complex128) - np.outer(g, g.conj())
