"""Hot time-stepping loops.

The three propagation loops below dominate runtime: many thousands of small
dense steps per run.  Each is written once in plain numpy and compiled with
numba's ``@njit`` when available.  Set the environment variable
``ZENO_DARK_PURE_NUMPY=1`` (before import) to force the interpreted numpy
path; the two backends compute identical recurrences.

``benchmarks/benchmark_kernels.py`` compares the two paths.
"""

from __future__ import annotations

import os

import numpy as np

PURE_NUMPY_ENV = "ZENO_DARK_PURE_NUMPY"


def _discrete_loop(U, f_seq, psi0):
    # psi_n = (1 - f_n f_n^dag) U psi_{n-1}, raw sub-normalized states
    m = f_seq.shape[0]
    n = psi0.shape[0]
    states = np.empty((m + 1, n), dtype=np.complex128)
    norms = np.empty(m + 1)
    orth = np.empty(m + 1)
    psi = psi0.copy()
    states[0] = psi
    norms[0] = np.linalg.norm(psi)
    orth[0] = 0.0
    for s in range(m):
        f = f_seq[s]
        psi = U @ psi
        psi = psi - np.vdot(f, psi) * f
        states[s + 1] = psi
        norms[s + 1] = np.linalg.norm(psi)
        orth[s + 1] = np.abs(np.vdot(f, psi))
    return states, norms, orth


def _continuous_loop(H, f_grid, f_mid, fdot_mid, psi0, dt):
    # one step: psi <- exp(-i H_D(t + dt/2) dt) psi with
    # H_D = P H P + i(|fdot><f| - |f><fdot|), P = 1 - |f><f|, all at midpoint
    steps = f_mid.shape[0]
    n = psi0.shape[0]
    states = np.empty((steps + 1, n), dtype=np.complex128)
    norms = np.empty(steps + 1)
    orth = np.empty(steps + 1)
    psi = psi0.copy()
    states[0] = psi
    norms[0] = np.linalg.norm(psi)
    orth[0] = np.abs(np.vdot(f_grid[0], psi))
    eye = np.eye(n, dtype=np.complex128)
    for s in range(steps):
        f = f_mid[s]
        fd = fdot_mid[s]
        P = eye - np.outer(f, np.conj(f))
        hd = P @ H @ P + 1j * (np.outer(fd, np.conj(f)) - np.outer(f, np.conj(fd)))
        w, v = np.linalg.eigh(hd)
        psi = v @ (np.exp(-1j * w * dt) * (np.conj(v.T) @ psi))
        states[s + 1] = psi
        norms[s + 1] = np.linalg.norm(psi)
        orth[s + 1] = np.abs(np.vdot(f_grid[s + 1], psi))
    return states, norms, orth


def _embedded_loop(f_mid, psi0, energy, dt):
    # exact rank-1 midpoint step: exp(-i E dt |f><f|) = 1 + (e^{-i E dt} - 1)|f><f|
    steps = f_mid.shape[0]
    n = psi0.shape[0]
    states = np.empty((steps + 1, n), dtype=np.complex128)
    psi = psi0.copy()
    states[0] = psi
    factor = np.exp(-1j * energy * dt) - 1.0
    for s in range(steps):
        f = f_mid[s]
        psi = psi + factor * np.vdot(f, psi) * f
        states[s + 1] = psi
    return states


# Exported interpreted variants, used by the benchmark and the backend tests.
discrete_loop_numpy = _discrete_loop
continuous_loop_numpy = _continuous_loop
embedded_loop_numpy = _embedded_loop


def _numba_requested() -> bool:
    flag = os.environ.get(PURE_NUMPY_ENV, "").strip().lower()
    return flag not in {"1", "true", "yes", "on"}


USING_NUMBA = False
if _numba_requested():
    try:
        from numba import njit
    except ImportError:
        pass
    else:
        discrete_loop = njit(cache=True)(_discrete_loop)
        continuous_loop = njit(cache=True)(_continuous_loop)
        embedded_loop = njit(cache=True)(_embedded_loop)
        USING_NUMBA = True

if not USING_NUMBA:
    discrete_loop = _discrete_loop
    continuous_loop = _continuous_loop
    embedded_loop = _embedded_loop


def backend() -> str:
    """Name of the active loop backend, ``"numba"`` or ``"numpy"``."""
    return "numba" if USING_NUMBA else "numpy"
