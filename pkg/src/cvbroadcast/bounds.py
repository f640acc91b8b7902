"""Closed-form noise limits for broadcasting, purification and phase conjugation.

Noise is measured by the noise sum ``Var(x) + Var(y)`` of a mode, which is
``1/2`` for coherent states and ``nbar + 1/2`` for displaced thermal states.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gaussian import STRUCTURE_TOL

BROADCAST = "broadcast"
PURIFY = "purify"
PHASE_CONJUGATE = "phase_conjugate"
AMPLIFIER = "amplifier"

PRESERVING = "preserving"
CONJUGATING = "conjugating"


def _check_gamma(gamma: float) -> None:
    if gamma < 0.5 - 1e-12:
        raise ValueError(f"noise sum {gamma} is below the vacuum value 1/2")


def broadcast_bound(gamma: float, n: int, m: int) -> float:
    """Minimal per-copy noise for amplitude-preserving N -> M broadcasting, ``M > N``."""
    _check_gamma(gamma)
    if not m > n >= 1:
        raise ValueError(f"broadcasting needs M > N >= 1, got N={n}, M={m}")
    return 0.5 + (gamma - 0.5) / n + 1.0 / n - 1.0 / m


def purification_bound(gamma: float, n: int) -> float:
    """Minimal per-copy noise for N -> M purification (any ``M <= N``)."""
    _check_gamma(gamma)
    if n < 1:
        raise ValueError("N must be positive")
    return 0.5 + (gamma - 0.5) / n


def phase_conj_bound(gamma: float, n: int) -> float:
    """Minimal per-copy noise for phase-conjugating broadcasting; independent of M."""
    _check_gamma(gamma)
    if n < 1:
        raise ValueError("N must be positive")
    return 0.5 + (gamma + 0.5) / n


def amplifier_bound(input_sum: float, gain: float, sign: str = PRESERVING) -> float:
    """Least output noise sum of a linear amplifier: ``G * input + |G -+ 1| / 2``."""
    _check_gamma(input_sum)
    if gain <= 0:
        raise ValueError(f"gain must be positive, got {gain}")
    if sign == PRESERVING:
        return gain * input_sum + abs(gain - 1) / 2
    if sign == CONJUGATING:
        return gain * input_sum + abs(gain + 1) / 2
    raise ValueError(f"unknown amplifier sign {sign!r}")


def superbroadcast_threshold(n: int, m: int) -> float:
    """Input thermal photon number above which N -> M broadcasting lowers the local noise."""
    if n < 2:
        raise ValueError("superbroadcasting requires N >= 2")
    if m <= n:
        raise ValueError(f"broadcasting needs M > N, got N={n}, M={m}")
    return (m - n) / (m * (n - 1))


@dataclass(frozen=True)
class BoundQuery:
    gamma: float
    n: int
    m: int
    kind: str = BROADCAST
    gain: float | None = None
    sign: str = PRESERVING

    def __post_init__(self):
        _check_gamma(self.gamma)

    def value(self) -> float:
        if self.kind == BROADCAST:
            return broadcast_bound(self.gamma, self.n, self.m)
        if self.kind == PURIFY:
            return purification_bound(self.gamma, self.n)
        if self.kind == PHASE_CONJUGATE:
            return phase_conj_bound(self.gamma, self.n)
        if self.kind == AMPLIFIER:
            gain = self.m / self.n if self.gain is None else self.gain
            return amplifier_bound(self.gamma, gain, self.sign)
        raise ValueError(f"unknown bound kind {self.kind!r}")


@dataclass(frozen=True)
class CauchySchwarzCheck:
    moments: np.ndarray
    """``<b_i^dag b_j>`` including the coherent background."""
    slack: np.ndarray
    """``sqrt(<b_i^dag b_i><b_j^dag b_j>) - |<b_i^dag b_j>|``, non-negative when the inequality holds."""
    holds: bool
    equality: np.ndarray
    """Boolean matrix of pairs where the inequality is tight."""

    @property
    def all_tight(self) -> bool:
        return bool(self.equality.all())


def check_cauchy_schwarz(correlations, nbar, amplitudes=None, tol: float = STRUCTURE_TOL) -> CauchySchwarzCheck:
    """Check ``|<b_i^dag b_j>| <= sqrt(<b_i^dag b_i><b_j^dag b_j>)`` on every pair.

    Parameters
    ----------
    correlations : (M, M) complex array
        Connected correlations ``<b_i^dag b_j> - <b_i^dag><b_j>``.
    nbar : sequence of float
        Per-copy photon number above the coherent background; must match the diagonal.
    amplitudes : sequence of complex, optional
        Per-copy ``<b_i>``; the coherent background ``conj(a_i) a_j`` is added back.
    """
    c = np.asarray(correlations, dtype=complex)
    nbar = np.asarray(nbar, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] != nbar.size:
        raise ValueError("correlation matrix and nbar list have inconsistent sizes")
    if np.abs(c - c.conj().T).max() > tol:
        raise ValueError("correlation matrix is not Hermitian")
    if np.abs(np.diag(c).real - nbar).max() > tol:
        raise ValueError("nbar list does not match the correlation diagonal")
    amps = np.zeros(nbar.size, dtype=complex) if amplitudes is None else np.asarray(amplitudes, dtype=complex)
    moments = c + np.outer(amps.conj(), amps)
    occ = np.clip(np.diag(moments).real, 0.0, None)
    slack = np.sqrt(np.outer(occ, occ)) - np.abs(moments)
    return CauchySchwarzCheck(moments, slack, bool(slack.min() >= -tol), np.abs(slack) <= tol)
