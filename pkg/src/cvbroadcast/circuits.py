"""Optical circuits for optimal broadcasting, purification and phase conjugation.

All three circuits start by concentrating the ``N`` equal-amplitude inputs into a
single mode with a DFT multisplitter and discarding the other ``N - 1`` outputs.

* broadcast: amplify the concentrated mode with gain ``M/N`` and distribute it over
  ``M`` outputs with ``M - 1`` vacua.
* purify: distribute the concentrated mode over ``N`` outputs with ``N - 1`` vacua
  and keep ``M`` of them.
* phase conjugate: heterodyne the concentrated mode and prepare ``M`` coherent
  states at ``conj(alpha_o) / sqrt(N)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Union

import numpy as np

from . import bounds
from .gaussian import (
    PHASE_PRESERVING,
    STRUCTURE_TOL,
    GaussianState,
    add_vacuum,
    amplifier_channel,
    apply_channel,
    apply_symplectic,
    discard,
    displaced_thermal,
    heterodyne_prepare_channel,
    mode_stats,
    multisplitter,
    pairwise_number_correlations,
    tensor,
)

THRESHOLD_TOL = 1e-12


@dataclass(frozen=True)
class Multisplit:
    modes: tuple[int, ...]
    inverse: bool = False


@dataclass(frozen=True)
class Discard:
    modes: tuple[int, ...]


@dataclass(frozen=True)
class AddVacuum:
    k: int


@dataclass(frozen=True)
class Amplify:
    mode: int
    gain: float
    kind: str = PHASE_PRESERVING


@dataclass(frozen=True)
class HeterodynePrepare:
    mode: int
    scale: float
    copies: int
    conjugate: bool = True


Stage = Union[Multisplit, Discard, AddVacuum, Amplify, HeterodynePrepare]


def _modes_after(stage: Stage, n: int) -> int:
    def check(modes):
        if any(not 0 <= k < n for k in modes):
            raise ValueError(f"stage {stage} refers to a mode outside 0..{n - 1}")

    if isinstance(stage, Multisplit):
        check(stage.modes)
        return n
    if isinstance(stage, Discard):
        check(stage.modes)
        return n - len(set(stage.modes))
    if isinstance(stage, AddVacuum):
        return n + stage.k
    if isinstance(stage, Amplify):
        check([stage.mode])
        return n
    if isinstance(stage, HeterodynePrepare):
        check([stage.mode])
        return n - 1 + stage.copies
    raise TypeError(f"unknown stage {stage!r}")


@dataclass(frozen=True)
class CircuitSpec:
    n_in: int
    n_out: int
    stages: tuple[Stage, ...] = field(default_factory=tuple)

    def __post_init__(self):
        n = self.n_in
        for stage in self.stages:
            n = _modes_after(stage, n)
            if n < 1:
                raise ValueError("circuit discards every mode")
        if n != self.n_out:
            raise ValueError(f"stages leave {n} modes, expected {self.n_out}")

    def run(self, state: GaussianState) -> GaussianState:
        if state.n_modes != self.n_in:
            raise ValueError(f"circuit takes {self.n_in} modes, got {state.n_modes}")
        for stage in self.stages:
            state = _apply_stage(state, stage)
        return state


def _apply_stage(state: GaussianState, stage: Stage) -> GaussianState:
    if isinstance(stage, Multisplit):
        smap = multisplitter(len(stage.modes))
        if stage.inverse:
            smap = smap.inverse()
        return apply_symplectic(state, smap, stage.modes)
    if isinstance(stage, Discard):
        return discard(state, stage.modes)
    if isinstance(stage, AddVacuum):
        return add_vacuum(state, stage.k)
    if isinstance(stage, Amplify):
        return apply_channel(state, amplifier_channel(stage.gain, stage.kind), [stage.mode])
    if isinstance(stage, HeterodynePrepare):
        chan = heterodyne_prepare_channel(stage.scale, stage.copies, stage.conjugate)
        return apply_channel(state, chan, [stage.mode])
    raise TypeError(f"unknown stage {stage!r}")


def _concentrate(n: int) -> list[Stage]:
    if n == 1:
        return []
    return [Multisplit(tuple(range(n))), Discard(tuple(range(1, n)))]


def _distribute(m: int) -> list[Stage]:
    if m == 1:
        return []
    return [AddVacuum(m - 1), Multisplit(tuple(range(m)), inverse=True)]


def build_broadcast_circuit(n: int, m: int) -> CircuitSpec:
    if not m > n >= 1:
        raise ValueError(f"broadcasting needs M > N >= 1, got N={n}, M={m}")
    stages = _concentrate(n) + [Amplify(0, m / n)] + _distribute(m)
    return CircuitSpec(n, m, tuple(stages))


def build_purify_circuit(n: int, m: int) -> CircuitSpec:
    if not 1 <= m <= n:
        raise ValueError(f"purification needs 1 <= M <= N, got N={n}, M={m}")
    stages = _concentrate(n) + _distribute(n)
    if m < n:
        stages.append(Discard(tuple(range(m, n))))
    return CircuitSpec(n, m, tuple(stages))


def build_phase_conjugate_circuit(n: int, m: int) -> CircuitSpec:
    if n < 1 or m < 1:
        raise ValueError(f"need N >= 1 and M >= 1, got N={n}, M={m}")
    stages = _concentrate(n) + [HeterodynePrepare(0, 1 / np.sqrt(n), m, conjugate=True)]
    return CircuitSpec(n, m, tuple(stages))


@dataclass(frozen=True)
class BroadcastReport:
    kind: str
    n: int
    m: int
    alpha_in: complex
    gamma_in: float
    per_copy_amplitude: tuple[complex, ...]
    per_copy_noise: tuple[float, ...]
    gamma_out: float
    bound: float
    correlations: np.ndarray
    output: GaussianState
    requested_nbar: float | None = None

    @property
    def nbar_in(self) -> float:
        # echo the requested value so reports do not carry gamma - 1/2 roundoff
        if self.requested_nbar is not None:
            return self.requested_nbar
        return self.gamma_in - 0.5

    @property
    def output_nbar(self) -> float:
        return self.gamma_out - 0.5

    @property
    def saturated(self) -> bool:
        return abs(self.gamma_out - self.bound) <= STRUCTURE_TOL

    @property
    def superbroadcast(self) -> bool:
        return self.gamma_out < self.gamma_in - THRESHOLD_TOL

    @property
    def at_threshold(self) -> bool:
        return abs(self.gamma_out - self.gamma_in) <= THRESHOLD_TOL

    def to_dict(self) -> dict:
        c = self.correlations
        if np.abs(c.imag).max() > 1e-12:
            raise ValueError("correlation matrix has an imaginary part; JSON output carries real parts only")
        return {
            "n": self.n,
            "m": self.m,
            "nbar_in": float(self.nbar_in),
            "alpha_re": float(self.alpha_in.real),
            "alpha_im": float(self.alpha_in.imag),
            "gamma_in": float(self.gamma_in),
            "gamma_out": float(self.gamma_out),
            "nbar_out": float(self.output_nbar),
            "bound": float(self.bound),
            "saturated": bool(self.saturated),
            "superbroadcast": bool(self.superbroadcast),
            "correlations": [[float(v) for v in row] for row in c.real],
        }


def product_input(n: int, nbar: float, alpha: complex = 0.0) -> GaussianState:
    """``n`` copies of the displaced thermal state."""
    if n < 1:
        raise ValueError("need at least one input copy")
    return tensor([displaced_thermal(nbar, alpha)] * n)


def _input_summary(state: GaussianState) -> tuple[complex, float]:
    stats = [mode_stats(state, k) for k in range(state.n_modes)]
    amps = np.array([s.amplitude for s in stats])
    if np.abs(amps - amps[0]).max() > STRUCTURE_TOL:
        raise ValueError("input copies must share the same amplitude")
    return complex(amps.mean()), float(np.mean([s.noise_sum for s in stats]))


def _report(kind: str, circuit: CircuitSpec, state: GaussianState, bound_fn) -> BroadcastReport:
    alpha, gamma_in = _input_summary(state)
    out = circuit.run(state)
    stats = [mode_stats(out, k) for k in range(out.n_modes)]
    amps = tuple(s.amplitude for s in stats)
    noise = tuple(s.noise_sum for s in stats)
    if max(abs(a - amps[0]) for a in amps) > STRUCTURE_TOL or max(noise) - min(noise) > STRUCTURE_TOL:
        raise RuntimeError("output copies are not identical")
    return BroadcastReport(
        kind=kind,
        n=circuit.n_in,
        m=circuit.n_out,
        alpha_in=alpha,
        gamma_in=gamma_in,
        per_copy_amplitude=amps,
        per_copy_noise=noise,
        gamma_out=float(np.mean(noise)),
        bound=bound_fn(gamma_in),
        correlations=pairwise_number_correlations(out),
        output=out,
    )


def broadcast_state(state: GaussianState, m: int) -> BroadcastReport:
    """Run the optimal broadcast circuit on an N-mode product input with equal amplitudes."""
    n = state.n_modes
    return _report("broadcast", build_broadcast_circuit(n, m), state, lambda g: bounds.broadcast_bound(g, n, m))


def purify_state(state: GaussianState, m: int) -> BroadcastReport:
    n = state.n_modes
    return _report("purify", build_purify_circuit(n, m), state, lambda g: bounds.purification_bound(g, n))


def phase_conjugate_state(state: GaussianState, m: int) -> BroadcastReport:
    n = state.n_modes
    return _report("phase_conjugate", build_phase_conjugate_circuit(n, m), state, lambda g: bounds.phase_conj_bound(g, n))


def run_broadcast(n: int, m: int, nbar_in: float, alpha: complex = 0.0) -> BroadcastReport:
    """Optimal N -> M broadcasting of displaced thermal states.

    Each copy is displaced thermal with ``nbar_out = nbar_in/N + (M-N)/(MN)``.
    """
    build_broadcast_circuit(n, m)
    return replace(broadcast_state(product_input(n, nbar_in, alpha), m), requested_nbar=float(nbar_in))


def run_purify(n: int, m: int, nbar_in: float, alpha: complex = 0.0) -> BroadcastReport:
    """Optimal N -> M purification, ``M <= N``; ``nbar_out = nbar_in / N`` for every M."""
    build_purify_circuit(n, m)
    return replace(purify_state(product_input(n, nbar_in, alpha), m), requested_nbar=float(nbar_in))


def run_phase_conjugate(n: int, m: int, nbar_in: float, alpha: complex = 0.0) -> BroadcastReport:
    """Heterodyne-and-prepare phase conjugation; copies carry ``conj(alpha)``."""
    build_phase_conjugate_circuit(n, m)
    return replace(phase_conjugate_state(product_input(n, nbar_in, alpha), m), requested_nbar=float(nbar_in))


def predicted_output_state(n: int, m: int, nbar_in: float, alpha: complex = 0.0) -> GaussianState:
    """Closed-form broadcast output: identical coherent states ``|alpha + z>^{(x)M}``
    mixed over a complex Gaussian ``z`` with ``<|z|^2> = n'/M``, ``n' = M(nbar+1)/N - 1``.
    """
    if not m > n >= 1:
        raise ValueError(f"broadcasting needs M > N >= 1, got N={n}, M={m}")
    if nbar_in < 0:
        raise ValueError("thermal photon number must be non-negative")
    alpha = complex(alpha)
    n_prime = m * (nbar_in + 1) / n - 1
    mean = np.tile([alpha.real, alpha.imag], m)
    cov = 0.25 * np.eye(2 * m) + n_prime / (2 * m) * np.kron(np.ones((m, m)), np.eye(2))
    return GaussianState(mean, cov)
