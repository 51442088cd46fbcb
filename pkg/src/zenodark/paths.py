"""Time-varying monitored states ``f(t)`` and their derivatives.

Four interchangeable representations:

``GeneratorPath``
    ``f(t) = exp(-i K t) f(0)`` for a time-independent Hermitian generator K.
``ModePath``
    ``f(t) = sum_j a_j exp(-i W_j t) |k_j>`` over orthonormal modes.
``SampledPath``
    discrete unit samples on an ascending time grid, interpolated on the
    unit sphere and differentiated with fourth-order stencils.
``DesignedPath``
    a closure produced by the inverse-design module.

``evaluate(t)`` returns the pair ``(f, fdot)`` with ``f`` unit-norm
(renormalized when drift exceeds the profile threshold).  Generator and mode
paths are interconvertible; ``period_of`` detects commensurate frequency
content by continued-fraction approximation.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .errors import DomainError, InputError, UnsupportedVariantError
from .linalg import as_state, hermitian_eigendecomposition, require_hermitian, require_unit
from .stencil import differentiate_series
from .tolerances import DEFAULT, ToleranceProfile

__all__ = [
    "MonitoredPath",
    "GeneratorPath",
    "ModePath",
    "SampledPath",
    "DesignedPath",
    "period_of",
]

_AMPLITUDE_FLOOR = 1e-12


class MonitoredPath:
    """Common interface of all monitored-state representations."""

    dim: int

    def evaluate(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(f(t), fdot(t))`` with ``f`` unit-norm."""
        raise NotImplementedError

    def evaluate_many(self, ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Evaluate on a whole grid; rows follow ``ts``."""
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        f = np.empty((ts.size, self.dim), dtype=np.complex128)
        fdot = np.empty_like(f)
        for i, t in enumerate(ts):
            f[i], fdot[i] = self.evaluate(float(t))
        return f, fdot


def _renormalized(f: np.ndarray, tol: ToleranceProfile) -> np.ndarray:
    nrm = np.linalg.norm(f)
    if abs(nrm - 1.0) > tol.path_renormalize_drift:
        return f / nrm
    return f


class GeneratorPath(MonitoredPath):
    """Monitored state rotated by a constant Hermitian generator."""

    def __init__(self, generator, initial_state, tol: ToleranceProfile = DEFAULT):
        self.generator = require_hermitian(generator, tol, name="path generator")
        self.initial_state = require_unit(initial_state, tol, name="initial monitored state")
        if self.generator.shape[0] != self.initial_state.shape[0]:
            raise InputError("generator and initial monitored state dimensions differ")
        self.dim = self.initial_state.shape[0]
        self._tol = tol
        dec = hermitian_eigendecomposition(self.generator, tol)
        self._frequencies = dec.eigenvalues
        self._modes = dec.eigenvectors
        self._coefficients = self._modes.conj().T @ self.initial_state

    def evaluate(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        phased = np.exp(-1j * self._frequencies * t) * self._coefficients
        f = self._modes @ phased
        fdot = self._modes @ (-1j * self._frequencies * phased)
        return _renormalized(f, self._tol), fdot

    def evaluate_many(self, ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        phased = np.exp(-1j * np.outer(ts, self._frequencies)) * self._coefficients
        f = phased @ self._modes.T
        fdot = (-1j * self._frequencies * phased) @ self._modes.T
        norms = np.linalg.norm(f, axis=1)
        drift = np.abs(norms - 1.0) > self._tol.path_renormalize_drift
        if drift.any():
            f[drift] /= norms[drift, None]
        return f, fdot

    def to_mode_path(self) -> "ModePath":
        """Equivalent mode representation over the generator's eigenbasis."""
        return ModePath(
            self._coefficients, self._frequencies, self._modes, tol=self._tol
        )


class ModePath(MonitoredPath):
    """Coherent superposition of orthonormal modes with fixed frequencies."""

    def __init__(self, amplitudes, frequencies, modes=None, tol: ToleranceProfile = DEFAULT):
        self.amplitudes = np.asarray(amplitudes, dtype=np.complex128)
        self.frequencies = np.asarray(frequencies, dtype=float)
        if self.amplitudes.ndim != 1 or self.amplitudes.shape != self.frequencies.shape:
            raise InputError("amplitudes and frequencies must be 1-D and of equal length")
        total = float(np.sum(np.abs(self.amplitudes) ** 2))
        if abs(total - 1.0) > tol.path_norm:
            raise InputError(
                f"mode amplitudes must satisfy sum |a_j|^2 = 1, got {total:.12g}"
            )
        if modes is None:
            self.modes = np.eye(self.amplitudes.size, dtype=np.complex128)
        else:
            self.modes = np.asarray(modes, dtype=np.complex128)
            if self.modes.ndim != 2 or self.modes.shape[1] != self.amplitudes.size:
                raise InputError("modes must be a matrix with one column per amplitude")
            gram = self.modes.conj().T @ self.modes
            if np.abs(gram - np.eye(gram.shape[0])).max() > tol.unit_state:
                raise InputError("mode vectors must be orthonormal")
        self.dim = self.modes.shape[0]
        self._tol = tol

    def evaluate(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        phased = self.amplitudes * np.exp(-1j * self.frequencies * t)
        f = self.modes @ phased
        fdot = self.modes @ (-1j * self.frequencies * phased)
        return _renormalized(f, self._tol), fdot

    def evaluate_many(self, ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        phased = np.exp(-1j * np.outer(ts, self.frequencies)) * self.amplitudes
        f = phased @ self.modes.T
        fdot = (-1j * self.frequencies * phased) @ self.modes.T
        norms = np.linalg.norm(f, axis=1)
        drift = np.abs(norms - 1.0) > self._tol.path_renormalize_drift
        if drift.any():
            f[drift] /= norms[drift, None]
        return f, fdot

    def to_generator_path(self) -> GeneratorPath:
        """Equivalent generator representation.

        Modes outside the given set are assigned frequency zero, which does
        not affect the path itself.
        """
        K = (self.modes * self.frequencies) @ self.modes.conj().T
        K = 0.5 * (K + K.conj().T)
        f0 = self.modes @ self.amplitudes
        return GeneratorPath(K, f0, tol=self._tol)


class SampledPath(MonitoredPath):
    """Monitored state known only at discrete sample times.

    Between samples the state is interpolated along the great circle of the
    unit sphere after aligning the relative phase of the bracketing samples,
    with the removed phase restored linearly, so interpolation is exact at
    the nodes and unit-norm everywhere.  Node derivatives use fourth-order
    stencils; between nodes the derivative is interpolated linearly and its
    norm-violating radial part is projected out.
    """

    def __init__(self, times, samples, tol: ToleranceProfile = DEFAULT):
        self.times = np.asarray(times, dtype=float)
        self.samples = np.asarray(samples, dtype=np.complex128)
        if self.times.ndim != 1 or self.samples.ndim != 2:
            raise InputError("need 1-D times and a matrix of samples")
        if self.samples.shape[0] != self.times.size:
            raise InputError("one sample per time required")
        if self.times.size < 5:
            raise InputError("need at least 5 samples")
        if np.any(np.diff(self.times) <= 0):
            raise InputError("sample times must be strictly ascending")
        norms = np.linalg.norm(self.samples, axis=1)
        worst = float(np.abs(norms - 1.0).max())
        if worst > tol.path_norm:
            raise InputError(
                f"samples must be unit-norm, worst deviation {worst:.3e}"
            )
        self.samples = self.samples / norms[:, None]
        self.dim = self.samples.shape[1]
        self._tol = tol
        self._derivatives = differentiate_series(self.samples, self.times)

    def evaluate(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        t0, t1 = self.times[0], self.times[-1]
        slack = 1e-12 * max(1.0, abs(t0), abs(t1))
        if t < t0 - slack or t > t1 + slack:
            raise DomainError(
                f"t = {t:.12g} outside sampled range [{t0:.12g}, {t1:.12g}]"
            )
        t = min(max(t, t0), t1)
        i = int(np.searchsorted(self.times, t, side="right")) - 1
        i = min(max(i, 0), self.times.size - 2)
        ta, tb = self.times[i], self.times[i + 1]
        u = (t - ta) / (tb - ta)
        a, b = self.samples[i], self.samples[i + 1]
        overlap = np.vdot(a, b)
        theta = float(np.angle(overlap))
        b_aligned = b * np.exp(-1j * theta)
        cosw = min(max(float(np.abs(overlap)), -1.0), 1.0)
        omega = math.acos(cosw)
        if omega < 1e-9:
            geo = (1.0 - u) * a + u * b_aligned
            geo /= np.linalg.norm(geo)
        else:
            geo = (
                math.sin((1.0 - u) * omega) * a + math.sin(u * omega) * b_aligned
            ) / math.sin(omega)
        f = geo * np.exp(1j * theta * u)

        fdot = (1.0 - u) * self._derivatives[i] + u * self._derivatives[i + 1]
        fdot = fdot - np.real(np.vdot(f, fdot)) * f
        return _renormalized(f, self._tol), fdot


class DesignedPath(MonitoredPath):
    """Monitored state produced by inverse design, held as callables."""

    def __init__(self, dim: int, state_fn, derivative_fn, many_fn=None,
                 tol: ToleranceProfile = DEFAULT):
        self.dim = int(dim)
        self._state_fn = state_fn
        self._derivative_fn = derivative_fn
        self._many_fn = many_fn
        self._tol = tol

    def evaluate(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        f = as_state(self._state_fn(t), self.dim)
        fdot = as_state(self._derivative_fn(t), self.dim)
        return _renormalized(f, self._tol), fdot

    def evaluate_many(self, ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        if self._many_fn is None:
            return super().evaluate_many(ts)
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        f, fdot = self._many_fn(ts)
        norms = np.linalg.norm(f, axis=1)
        drift = np.abs(norms - 1.0) > self._tol.path_renormalize_drift
        if drift.any():
            f = f.copy()
            f[drift] /= norms[drift, None]
        return f, fdot


def _active_spectrum(path: MonitoredPath) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(path, GeneratorPath):
        amps, freqs = path._coefficients, path._frequencies
    elif isinstance(path, ModePath):
        amps, freqs = path.amplitudes, path.frequencies
    else:
        raise UnsupportedVariantError(
            "period detection needs a generator or mode path"
        )
    active = np.abs(amps) > _AMPLITUDE_FLOOR
    return amps[active], freqs[active]


def period_of(path: MonitoredPath, tol: ToleranceProfile = DEFAULT) -> float | None:
    """Smallest period of ``f(t)`` up to a global phase, or None if aperiodic.

    The path is cyclic when all pairwise frequency differences share a
    common measure; the global phase ``exp(-i W_ref T)`` of the reference
    frequency is quotiented out.  Differences are compared by
    continued-fraction approximation with denominators capped at
    ``tol.rational_denominator_cap`` and acceptance ``tol.rational_tolerance``;
    the candidate period is then verified against the evaluated path.

    Returns 0.0 for a path that is stationary up to a global phase (every
    positive time is a period).
    """
    _, freqs = _active_spectrum(path)
    ref = freqs[0]
    scale = max(1.0, float(np.abs(freqs).max()))
    diffs = np.array([w - ref for w in freqs[1:] if abs(w - ref) > tol.rational_tolerance * scale])
    if diffs.size == 0:
        return 0.0

    d_star = diffs[np.argmin(np.abs(diffs))]
    approximants: list[Fraction] = []
    denominator_lcm = 1
    for d in diffs:
        frac = Fraction(float(d / d_star)).limit_denominator(tol.rational_denominator_cap)
        if abs(float(frac) - d / d_star) > tol.rational_tolerance:
            return None
        denominator_lcm = math.lcm(denominator_lcm, frac.denominator)
        approximants.append(frac)
    common = 0
    for frac in approximants:
        common = math.gcd(common, abs(frac.numerator) * (denominator_lcm // frac.denominator))
    period = 2.0 * math.pi * denominator_lcm / (abs(d_star) * common)

    f_end, _ = path.evaluate(period)
    f_start, _ = path.evaluate(0.0)
    mismatch = np.linalg.norm(f_end * np.exp(1j * ref * period) - f_start)
    if mismatch > tol.period_return:
        return None
    return float(period)
