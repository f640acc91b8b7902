"""Brute-force density-matrix simulation in a truncated Fock space.

Used as an independent check of the Gaussian simulator. Every mode keeps Fock
levels ``0..D-1``; operators are exponentials of truncated ladder-operator
generators. States are never renormalized: the weight lost to truncation is
carried as ``trace_deficit`` and reported.

The oracle circuits deliberately avoid the DFT multisplitters used by
:mod:`cvbroadcast.circuits`: concentration and distribution are chains of
two-mode beam splitters, the amplifier is a two-mode squeezer with a vacuum
ancilla, and heterodyne detection is simulated by sampling outcomes from the
Husimi Q function of the measured mode.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from .gaussian import ModeStats

MAX_DIM = 20736
"""Largest total Hilbert-space dimension ``D**n`` the density-matrix path accepts."""

DEFICIT_BUDGET = 1e-2
FIDELITY_TARGET = 0.999


class ResourceGuardError(ValueError):
    """Requested oracle run is too large or too poorly resolved at this cutoff."""


class TruncationWarning(UserWarning):
    pass


def ladder(cutoff: int) -> np.ndarray:
    """Truncated annihilation operator, ``a[n, n+1] = sqrt(n+1)``."""
    if cutoff < 2:
        raise ValueError("cutoff must be at least 2")
    return np.diag(np.sqrt(np.arange(1, cutoff)), k=1).astype(complex)


@dataclass(frozen=True)
class FockDensity:
    rho: np.ndarray
    n_modes: int
    cutoff: int

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        dim = self.cutoff**self.n_modes
        if rho.shape != (dim, dim):
            raise ValueError(f"rho has shape {rho.shape}, expected {(dim, dim)}")
        if dim > MAX_DIM:
            raise ResourceGuardError(f"dimension {dim} exceeds the cap {MAX_DIM}")
        object.__setattr__(self, "rho", 0.5 * (rho + rho.conj().T))

    @property
    def trace(self) -> float:
        return float(np.trace(self.rho).real)

    @property
    def trace_deficit(self) -> float:
        return 1.0 - self.trace

    def tensor(self) -> np.ndarray:
        return self.rho.reshape((self.cutoff,) * (2 * self.n_modes))


@dataclass(frozen=True)
class FockUnitary:
    """Truncated unitary on ``n_modes`` modes.

    Agrees with the true operator only on states away from the truncation
    boundary. When built with padding it is the low-lying block of a larger
    exponential and hence a contraction rather than a unitary.
    """

    matrix: np.ndarray
    label: str
    n_modes: int
    cutoff: int


def _padded(cutoff: int, pad: int | None) -> int:
    return cutoff if pad is None else cutoff + pad


def _compress(matrix: np.ndarray, work: int, cutoff: int, n_modes: int) -> np.ndarray:
    """Keep the ``cutoff**n_modes`` block of an operator built at cutoff ``work``."""
    t = matrix.reshape((work,) * (2 * n_modes))[(slice(0, cutoff),) * (2 * n_modes)]
    return np.ascontiguousarray(t).reshape(cutoff**n_modes, cutoff**n_modes)


def _two_mode(generator, cutoff: int, pad: int | None) -> np.ndarray:
    work = _padded(cutoff, pad)
    a, eye = ladder(work), np.eye(work)
    a1, b1 = np.kron(a, eye), np.kron(eye, a)
    return _compress(expm(generator(a1, b1)), work, cutoff, 2)


def displacement_fock(alpha: complex, cutoff: int, pad: int | None = None) -> FockUnitary:
    """``exp(alpha a^dag - conj(alpha) a)``, so that ``a -> a + alpha``.

    By default the generator is truncated at ``cutoff`` itself, which gives an
    exactly unitary matrix that misrepresents only the highest levels. With
    ``pad`` the exponential is taken at ``cutoff + pad`` and compressed to
    ``cutoff`` levels; weight leaving the space then shows up as trace deficit.
    """
    alpha = complex(alpha)
    if abs(alpha) ** 2 > cutoff / 3:
        warnings.warn(f"|alpha|^2 = {abs(alpha) ** 2:.3g} is large for cutoff {cutoff}", TruncationWarning, stacklevel=2)
    work = _padded(cutoff, pad)
    a = ladder(work)
    u = expm(alpha * a.conj().T - alpha.conjugate() * a)
    return FockUnitary(_compress(u, work, cutoff, 1), "displacement", 1, cutoff)


def beam_splitter_fock(theta: float, cutoff: int, pad: int | None = None) -> FockUnitary:
    """``exp(theta (a^dag b - a b^dag))``: ``a -> cos a + sin b``, ``b -> -sin a + cos b``."""
    u = _two_mode(lambda a, b: theta * (a.conj().T @ b - a @ b.conj().T), cutoff, pad)
    return FockUnitary(u, "beam splitter", 2, cutoff)


def squeezer_fock(r: float, cutoff: int, pad: int | None = None) -> FockUnitary:
    """``exp(r (a b - a^dag b^dag))``: ``a -> cosh a - sinh b^dag``."""
    if np.sinh(r) ** 2 > cutoff / 3:
        warnings.warn(f"sinh(r)^2 = {np.sinh(r) ** 2:.3g} is large for cutoff {cutoff}", TruncationWarning, stacklevel=2)
    u = _two_mode(lambda a, b: r * (a @ b - a.conj().T @ b.conj().T), cutoff, pad)
    return FockUnitary(u, "squeezer", 2, cutoff)


def _contract(t: np.ndarray, op: np.ndarray, axes: Sequence[int]) -> np.ndarray:
    k = len(axes)
    out = np.tensordot(op, t, axes=(list(range(k, 2 * k)), list(axes)))
    return np.moveaxis(out, list(range(k)), list(axes))


def apply_unitary(state: FockDensity, unitary: FockUnitary, modes: Sequence[int]) -> FockDensity:
    """``rho -> U rho U^dag`` with ``U`` acting on ``modes``."""
    modes = list(modes)
    if len(modes) != unitary.n_modes or unitary.cutoff != state.cutoff:
        raise ValueError("unitary does not match the targeted modes or cutoff")
    if any(not 0 <= k < state.n_modes for k in modes):
        raise IndexError(f"modes {modes} out of range for {state.n_modes} modes")
    d, n = state.cutoff, state.n_modes
    op = unitary.matrix.reshape((d,) * (2 * len(modes)))
    t = _contract(state.tensor(), op, modes)
    t = _contract(t, op.conj(), [k + n for k in modes])
    return FockDensity(t.reshape(d**n, d**n), n, d)


def tensor_fock(states: Sequence[FockDensity]) -> FockDensity:
    states = list(states)
    if not states:
        raise ValueError("tensor product of an empty list")
    cutoff = states[0].cutoff
    if any(s.cutoff != cutoff for s in states):
        raise ValueError("all factors need the same cutoff")
    n = sum(s.n_modes for s in states)
    if cutoff**n > MAX_DIM:
        raise ResourceGuardError(f"{n} modes at cutoff {cutoff} exceed the dimension cap {MAX_DIM}")
    rho = states[0].rho
    for s in states[1:]:
        rho = np.kron(rho, s.rho)
    return FockDensity(rho, n, cutoff)


def vacuum_fock(cutoff: int, n_modes: int = 1) -> FockDensity:
    dim = cutoff**n_modes
    rho = np.zeros((dim, dim), dtype=complex)
    rho[0, 0] = 1.0
    return FockDensity(rho, n_modes, cutoff)


def add_vacuum_fock(state: FockDensity, k: int) -> FockDensity:
    if k == 0:
        return state
    return tensor_fock([state, vacuum_fock(state.cutoff, k)])


def thermal_fock(nbar: float, cutoff: int) -> FockDensity:
    """Thermal state with ``p_n = (nbar/(nbar+1))^n / (nbar+1)`` for ``n < cutoff``.

    The missing tail has weight ``(nbar/(nbar+1))**cutoff``.
    """
    if nbar < 0:
        raise ValueError(f"thermal photon number must be non-negative, got {nbar}")
    if cutoff < 2:
        raise ValueError("cutoff must be at least 2")
    q = nbar / (nbar + 1)
    p = q ** np.arange(cutoff) / (nbar + 1)
    return FockDensity(np.diag(p).astype(complex), 1, cutoff)


def displaced_thermal_fock(nbar: float, alpha: complex, cutoff: int) -> FockDensity:
    return apply_unitary(thermal_fock(nbar, cutoff), displacement_fock(alpha, cutoff), [0])


def coherent_vectors(betas, cutoff: int) -> np.ndarray:
    """Truncated coherent-state vectors, one column per entry of ``betas``."""
    betas = np.asarray(betas, dtype=complex).reshape(-1)
    n = np.arange(cutoff)
    log_fact = np.cumsum(np.log(np.maximum(n, 1)))
    with np.errstate(divide="ignore", invalid="ignore"):
        log_abs = np.log(np.abs(betas))
        mags = np.exp(np.outer(n, log_abs) - 0.5 * log_fact[:, None] - 0.5 * np.abs(betas) ** 2)
    mags[0] = np.exp(-0.5 * np.abs(betas) ** 2)
    return mags * np.exp(1j * np.outer(n, np.angle(betas)))


def reduced(state: FockDensity, keep: Sequence[int]) -> FockDensity:
    """Partial trace onto ``keep`` (in the given order)."""
    keep = list(keep)
    n = state.n_modes
    if not keep or any(not 0 <= k < n for k in keep) or len(set(keep)) != len(keep):
        raise IndexError(f"invalid modes {keep} for {n} modes")
    rows = list(range(n))
    cols = [k + n if k in keep else k for k in range(n)]
    out = [k for k in keep] + [k + n for k in keep]
    t = np.einsum(state.tensor(), rows + cols, out)
    dim = state.cutoff ** len(keep)
    return FockDensity(t.reshape(dim, dim), len(keep), state.cutoff)


def fock_mode_stats(state: FockDensity, i: int = 0) -> ModeStats:
    """Amplitude and noise sum of mode ``i`` from truncated ladder matrix elements.

    Moments are taken on the unnormalized truncated state.
    """
    rho = reduced(state, [i]).rho if state.n_modes > 1 else state.rho
    a = ladder(state.cutoff)
    amp = np.trace(rho @ a)
    occ = np.trace(rho @ a.conj().T @ a).real
    return ModeStats(amp, 0.5 + occ - abs(amp) ** 2)


def _psd_sqrt(rho: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(rho)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity ``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2``."""
    rho = rho.rho if isinstance(rho, FockDensity) else np.asarray(rho, dtype=complex)
    sigma = sigma.rho if isinstance(sigma, FockDensity) else np.asarray(sigma, dtype=complex)
    s = _psd_sqrt(rho)
    w = np.linalg.eigvalsh(s @ sigma @ s)
    return float(min(1.0, np.sqrt(np.clip(w, 0.0, None)).sum() ** 2))


# --- oracle circuits -----------------------------------------------------------


@dataclass(frozen=True)
class OracleReport:
    kind: str
    n: int
    m: int
    nbar_in: float
    alpha: complex
    cutoff: int
    copies: tuple[ModeStats, ...]
    fidelities: tuple[float, ...]
    expected_amplitude: complex
    expected_nbar: float
    trace_deficit: float
    samples: int | None = None
    cross_correlation: complex | None = None
    extras: dict = field(default_factory=dict)

    @property
    def nbar_out(self) -> float:
        return float(np.mean([c.nbar_eff for c in self.copies]))

    @property
    def gamma_out(self) -> float:
        return float(np.mean([c.noise_sum for c in self.copies]))

    @property
    def min_fidelity(self) -> float:
        return float(min(self.fidelities))


def _guard(cutoff: int, live_modes: int, occupations: dict[str, float]) -> None:
    if cutoff < 2:
        raise ResourceGuardError("cutoff must be at least 2")
    if cutoff**live_modes > MAX_DIM:
        raise ResourceGuardError(
            f"{live_modes} live modes at cutoff {cutoff} give dimension {cutoff**live_modes} > {MAX_DIM}; "
            "lower the cutoff or the number of copies"
        )
    for where, occ in occupations.items():
        if occ >= cutoff / 3:
            raise ResourceGuardError(
                f"predicted occupation {occ:.3g} at {where} is not below cutoff/3 = {cutoff / 3:.3g}; "
                f"raise the cutoff to at least {int(np.floor(3 * occ)) + 1}"
            )


def _check_deficit(state: FockDensity, budget: float) -> None:
    if state.trace_deficit > budget:
        raise ResourceGuardError(f"trace deficit {state.trace_deficit:.3g} exceeds the budget {budget:.3g}")


def _inputs(n: int, nbar: float, alpha: complex, cutoff: int) -> FockDensity:
    one = displaced_thermal_fock(nbar, alpha, cutoff)
    return tensor_fock([one] * n)


def _concentrate_fock(state: FockDensity) -> FockDensity:
    """Beam-splitter chain leaving ``sum_k a_k / sqrt(n)`` in mode 0, then trace the rest."""
    for k in range(1, state.n_modes):
        bs = beam_splitter_fock(np.arctan(1 / np.sqrt(k)), state.cutoff)
        state = apply_unitary(state, bs, [0, k])
    return reduced(state, [0]) if state.n_modes > 1 else state


def _distribute_fock(state: FockDensity, m: int) -> FockDensity:
    """Split mode 0 into ``m`` equal-amplitude outputs using ``m - 1`` vacua."""
    state = add_vacuum_fock(state, m - 1)
    for k in range(1, m):
        bs = beam_splitter_fock(-np.arcsin(1 / np.sqrt(m - k + 1)), state.cutoff)
        state = apply_unitary(state, bs, [0, k])
    return state


def _finish(kind, n, m, nbar, alpha, cutoff, out: FockDensity, expected_amp, expected_nbar, **kw) -> OracleReport:
    copies, fids = [], []
    target = displaced_thermal_fock(expected_nbar, expected_amp, cutoff)
    for k in range(out.n_modes):
        single = reduced(out, [k]) if out.n_modes > 1 else out
        copies.append(fock_mode_stats(single))
        fids.append(fidelity(single, target))
    return OracleReport(
        kind=kind,
        n=n,
        m=m,
        nbar_in=float(nbar),
        alpha=complex(alpha),
        cutoff=cutoff,
        copies=tuple(copies),
        fidelities=tuple(fids),
        expected_amplitude=complex(expected_amp),
        expected_nbar=float(expected_nbar),
        trace_deficit=out.trace_deficit,
        **kw,
    )


def oracle_broadcast(n: int, m: int, nbar: float, alpha: complex, cutoff: int = 10,
                     deficit_budget: float = DEFICIT_BUDGET) -> OracleReport:
    """Fock-space run of the concentrate / amplify / distribute circuit.

    ``M == N`` is accepted (unit gain, no amplifier) as the equality case.
    """
    if not (1 <= n <= 2 and n <= m <= 3):
        raise ResourceGuardError(f"oracle_broadcast supports N <= 2, N <= M <= 3; got N={n}, M={m}")
    gain = m / n
    conc = nbar + n * abs(alpha) ** 2
    _guard(cutoff, max(n, 2, m), {
        "input": nbar + abs(alpha) ** 2,
        "concentrated mode": conc,
        "amplifier output": gain * conc + gain - 1,
        "amplifier ancilla": (gain - 1) * (nbar + 1),
    })
    state = _concentrate_fock(_inputs(n, nbar, alpha, cutoff))
    if gain > 1:
        state = add_vacuum_fock(state, 1)
        state = apply_unitary(state, squeezer_fock(np.arccosh(np.sqrt(gain)), cutoff), [0, 1])
        state = reduced(state, [0])
    out = _distribute_fock(state, m)
    _check_deficit(out, deficit_budget)
    expected = nbar / n + (m - n) / (m * n)
    return _finish("broadcast", n, m, nbar, alpha, cutoff, out, alpha, expected)


def oracle_purify(n: int, m: int, nbar: float, alpha: complex, cutoff: int = 14,
                  deficit_budget: float = DEFICIT_BUDGET) -> OracleReport:
    """Fock-space run of concentrate / split N ways / keep M."""
    if not (1 <= m <= n <= 3):
        raise ResourceGuardError(f"oracle_purify supports 1 <= M <= N <= 3; got N={n}, M={m}")
    _guard(cutoff, n, {"input": nbar + abs(alpha) ** 2, "concentrated mode": nbar + n * abs(alpha) ** 2})
    state = _concentrate_fock(_inputs(n, nbar, alpha, cutoff))
    out = _distribute_fock(state, n)
    if m < n:
        out = reduced(out, list(range(m)))
    _check_deficit(out, deficit_budget)
    return _finish("purify", n, m, nbar, alpha, cutoff, out, alpha, nbar / n)


def sample_husimi(state: FockDensity, samples: int, rng: np.random.Generator,
                  grid: int = 401, width: float = 8.0) -> tuple[np.ndarray, float]:
    """Draw heterodyne outcomes from ``Q(beta) = <beta|rho|beta> / pi`` of a single mode.

    ``Q`` is tabulated on a square grid centred on ``<a>`` spanning ``width``
    standard deviations, a cell is drawn with probability ``Q * area`` and the
    sample is placed uniformly inside it. Returns the samples and the Q mass
    found on the grid.
    """
    if state.n_modes != 1:
        raise ValueError("heterodyne sampling acts on a single mode")
    stats = fock_mode_stats(state)
    centre = stats.amplitude
    spread = np.sqrt(stats.noise_sum / 2 + 0.25)
    half = width * spread
    axis = np.linspace(-half, half, grid)
    step = axis[1] - axis[0]
    xs, ys = np.meshgrid(centre.real + axis, centre.imag + axis, indexing="ij")
    betas = (xs + 1j * ys).reshape(-1)
    vecs = coherent_vectors(betas, state.cutoff)
    q = np.einsum("ik,ij,jk->k", vecs.conj(), state.rho, vecs).real / np.pi
    weights = np.clip(q, 0.0, None) * step**2
    mass = float(weights.sum())
    idx = rng.choice(weights.size, size=samples, p=weights / mass)
    jitter = (rng.random((samples, 2)) - 0.5) * step
    return betas[idx] + jitter[:, 0] + 1j * jitter[:, 1], mass


def oracle_phase_conjugate(n: int, m: int, nbar: float, alpha: complex, cutoff: int = 12,
                           samples: int = 100_000, seed: int | None = None,
                           deficit_budget: float = DEFICIT_BUDGET) -> OracleReport:
    """Concentrate, heterodyne by Monte-Carlo outcome sampling, prepare coherent copies.

    Each copy is the outcome average of ``|conj(alpha_o)/sqrt(N)><...|``; all
    copies are prepared from the same outcome, so their reduced states coincide
    and ``cross_correlation`` is the sample covariance of the prepared amplitudes.
    """
    if not (1 <= n <= 2 and 1 <= m <= 2):
        raise ResourceGuardError(f"oracle_phase_conjugate supports N <= 2, M <= 2; got N={n}, M={m}")
    if samples < 10_000:
        raise ValueError(f"need at least 10^4 heterodyne samples, got {samples}")
    _guard(cutoff, n, {
        "input": nbar + abs(alpha) ** 2,
        "concentrated mode": nbar + n * abs(alpha) ** 2,
        "prepared copies": (nbar + 1) / n + abs(alpha) ** 2,
    })
    rng = np.random.default_rng(seed)
    state = _concentrate_fock(_inputs(n, nbar, alpha, cutoff))
    _check_deficit(state, deficit_budget)
    outcomes, mass = sample_husimi(state, samples, rng)
    prepared = outcomes.conj() / np.sqrt(n)

    a = ladder(cutoff)
    rho = np.zeros((cutoff, cutoff), dtype=complex)
    amps = np.empty(samples, dtype=complex)
    for chunk in np.array_split(np.arange(samples), max(1, samples // 20_000)):
        v = coherent_vectors(prepared[chunk], cutoff)
        rho += v @ v.conj().T
        amps[chunk] = np.einsum("ik,ij,jk->k", v.conj(), a, v)
    rho /= samples
    single = FockDensity(rho, 1, cutoff)
    _check_deficit(single, deficit_budget)
    cross = complex(np.mean(np.abs(amps) ** 2) - abs(amps.mean()) ** 2) if m > 1 else None

    expected_amp = np.conj(alpha)
    expected_nbar = (nbar + 1) / n
    stats = fock_mode_stats(single)
    fid = fidelity(single, displaced_thermal_fock(expected_nbar, expected_amp, cutoff))
    return OracleReport(
        kind="phase_conjugate",
        n=n,
        m=m,
        nbar_in=float(nbar),
        alpha=complex(alpha),
        cutoff=cutoff,
        copies=(stats,) * m,
        fidelities=(fid,) * m,
        expected_amplitude=complex(expected_amp),
        expected_nbar=float(expected_nbar),
        trace_deficit=single.trace_deficit,
        samples=samples,
        cross_correlation=cross,
        extras={"q_grid_mass": mass, "amplitude_stderr": float(np.std(prepared) / np.sqrt(samples))},
    )
