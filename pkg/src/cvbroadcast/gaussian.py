"""Multimode Gaussian states, symplectic maps and Gaussian channels.

Conventions used throughout the package:

* Quadratures are ``x = (a + a^dag) / 2`` and ``y = (a - a^dag) / (2i)``, so the
  vacuum has ``Var(x) = Var(y) = 1/4`` and ``Var(x) + Var(y) = 1/2 + <a^dag a> - |<a>|^2``.
* Phase-space vectors are interleaved, ``(x0, y0, x1, y1, ...)``.
* A complex mode map ``a_k -> sum_l u_kl a_l + v_kl a_l^dag`` is realified by sending
  ``u = p + iq`` to the block ``[[p, -q], [q, p]]`` and ``v = p + iq`` to ``[[p, q], [q, -p]]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

SYMMETRY_TOL = 1e-12
STRUCTURE_TOL = 1e-10

PHASE_PRESERVING = "phase_preserving"
PHASE_CONJUGATING = "phase_conjugating"

# complex conjugation of a single mode: (x, y) -> (x, -y)
CONJUGATION = np.diag([1.0, -1.0])


def omega(n_modes: int) -> np.ndarray:
    """Block-diagonal symplectic form ``(+) [[0, 1], [-1, 0]]`` on ``n_modes`` modes."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def realify(u, v=None) -> np.ndarray:
    """Real ``2n x 2n`` matrix of the mode map ``a -> u a + v a^dag``."""
    u = np.atleast_2d(np.asarray(u, dtype=complex))
    out = np.kron(u.real, np.eye(2)) + np.kron(u.imag, np.array([[0.0, -1.0], [1.0, 0.0]]))
    if v is not None:
        v = np.atleast_2d(np.asarray(v, dtype=complex))
        out = out + np.kron(v.real, np.diag([1.0, -1.0])) + np.kron(v.imag, np.array([[0.0, 1.0], [1.0, 0.0]]))
    return out


def _readonly(a, dtype=float) -> np.ndarray:
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


def _min_eig_with_form(sym: np.ndarray, antisym: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(sym + 0.25j * antisym).min())


@dataclass(frozen=True)
class GaussianState:
    """Mean vector and covariance matrix of an ``n_modes``-mode Gaussian state.

    Both arrays are stored read-only. Construction checks symmetry of ``cov`` and
    the uncertainty relation ``cov + (i/4) Omega >= 0``.
    """

    mean: np.ndarray
    cov: np.ndarray
    n_modes: int = field(init=False)

    def __post_init__(self):
        mean = _readonly(self.mean).reshape(-1)
        cov = _readonly(self.cov)
        if mean.size % 2 or cov.shape != (mean.size, mean.size):
            raise ValueError(f"inconsistent shapes: mean {mean.shape}, cov {cov.shape}")
        if mean.size == 0:
            raise ValueError("a Gaussian state needs at least one mode")
        if np.abs(cov - cov.T).max() > SYMMETRY_TOL:
            raise ValueError("covariance matrix is not symmetric")
        n = mean.size // 2
        if _min_eig_with_form(cov, omega(n)) < -STRUCTURE_TOL:
            raise ValueError("covariance matrix violates the uncertainty relation")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "n_modes", n)

    @property
    def amplitudes(self) -> np.ndarray:
        """Complex amplitudes ``<a_k>`` of every mode."""
        return self.mean[0::2] + 1j * self.mean[1::2]

    def total_photon_number(self) -> float:
        """``sum_k <a_k^dag a_k>``."""
        return float(np.trace(self.cov) + self.mean @ self.mean - 0.5 * self.n_modes)


@dataclass(frozen=True)
class SymplecticMap:
    """Affine phase-space map ``r -> S r + d`` with ``S Omega S^T = Omega``."""

    matrix: np.ndarray
    displacement: np.ndarray | None = None

    def __post_init__(self):
        s = _readonly(self.matrix)
        if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] % 2:
            raise ValueError(f"symplectic matrix must be 2n x 2n, got {s.shape}")
        d = np.zeros(s.shape[0]) if self.displacement is None else self.displacement
        d = _readonly(d).reshape(-1)
        if d.size != s.shape[0]:
            raise ValueError("displacement length does not match the matrix")
        om = omega(s.shape[0] // 2)
        if np.abs(s @ om @ s.T - om).max() > STRUCTURE_TOL:
            raise ValueError("matrix is not symplectic")
        object.__setattr__(self, "matrix", s)
        object.__setattr__(self, "displacement", d)

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2

    def inverse(self) -> "SymplecticMap":
        om = omega(self.n_modes)
        s_inv = -om @ self.matrix.T @ om
        return SymplecticMap(s_inv, -s_inv @ self.displacement)

    def embed(self, modes: Sequence[int], n_modes: int) -> "SymplecticMap":
        """Lift this map onto ``modes`` of an ``n_modes`` system, identity elsewhere."""
        modes = _check_modes(modes, n_modes)
        if len(modes) != self.n_modes:
            raise ValueError(f"map acts on {self.n_modes} modes, got {len(modes)} targets")
        idx = _quadrature_index(modes)
        s = np.eye(2 * n_modes)
        s[np.ix_(idx, idx)] = self.matrix
        d = np.zeros(2 * n_modes)
        d[idx] = self.displacement
        return SymplecticMap(s, d)


@dataclass(frozen=True)
class GaussianChannel:
    """Gaussian channel ``mean -> X mean + d``, ``cov -> X cov X^T + Y`` from n to m modes."""

    X: np.ndarray
    Y: np.ndarray
    d: np.ndarray | None = None

    def __post_init__(self):
        x = _readonly(np.atleast_2d(self.X))
        y = _readonly(np.atleast_2d(self.Y))
        if x.shape[0] % 2 or x.shape[1] % 2 or y.shape != (x.shape[0], x.shape[0]):
            raise ValueError(f"inconsistent channel shapes X {x.shape}, Y {y.shape}")
        d = np.zeros(x.shape[0]) if self.d is None else self.d
        d = _readonly(d).reshape(-1)
        if d.size != x.shape[0]:
            raise ValueError("displacement length does not match X")
        if np.abs(y - y.T).max() > SYMMETRY_TOL:
            raise ValueError("noise matrix Y is not symmetric")
        object.__setattr__(self, "X", x)
        object.__setattr__(self, "Y", y)
        object.__setattr__(self, "d", d)
        if self.cp_margin() < -STRUCTURE_TOL:
            raise ValueError("channel is not completely positive")

    @property
    def n_in(self) -> int:
        return self.X.shape[1] // 2

    @property
    def n_out(self) -> int:
        return self.X.shape[0] // 2

    def cp_margin(self) -> float:
        """Smallest eigenvalue of ``Y + (i/4)(Omega_m - X Omega_n X^T)``."""
        form = omega(self.n_out) - self.X @ omega(self.n_in) @ self.X.T
        return _min_eig_with_form(self.Y, form)


@dataclass(frozen=True)
class ModeStats:
    """First and second moments of a single mode.

    ``nbar_eff`` is the photon number above the coherent background,
    ``<a^dag a> - |<a>|^2 = noise_sum - 1/2``.
    """

    amplitude: complex
    noise_sum: float
    nbar_eff: float = field(init=False)

    def __post_init__(self):
        if self.noise_sum < 0.5 - STRUCTURE_TOL:
            raise ValueError(f"noise sum {self.noise_sum} is below the vacuum value 1/2")
        object.__setattr__(self, "amplitude", complex(self.amplitude))
        object.__setattr__(self, "noise_sum", float(self.noise_sum))
        object.__setattr__(self, "nbar_eff", self.noise_sum - 0.5)


def _check_modes(modes: Iterable[int], n_modes: int) -> list[int]:
    modes = [int(k) for k in modes]
    for k in modes:
        if not 0 <= k < n_modes:
            raise IndexError(f"mode index {k} out of range for {n_modes} modes")
    if len(set(modes)) != len(modes):
        raise ValueError(f"repeated mode index in {modes}")
    return modes


def _quadrature_index(modes: Sequence[int]) -> list[int]:
    return [q for k in modes for q in (2 * k, 2 * k + 1)]


# --- states -------------------------------------------------------------------


def vacuum(n_modes: int = 1) -> GaussianState:
    if n_modes < 1:
        raise ValueError("n_modes must be positive")
    return GaussianState(np.zeros(2 * n_modes), 0.25 * np.eye(2 * n_modes))


def displaced_thermal(nbar: float, alpha: complex = 0.0) -> GaussianState:
    """Single-mode displaced thermal state ``D(alpha) rho_nbar D(alpha)^dag``.

    Covariance ``(nbar/2 + 1/4) I``; noise sum ``nbar + 1/2``.
    """
    if nbar < 0:
        raise ValueError(f"thermal photon number must be non-negative, got {nbar}")
    alpha = complex(alpha)
    return GaussianState([alpha.real, alpha.imag], (nbar / 2 + 0.25) * np.eye(2))


def coherent(alpha: complex) -> GaussianState:
    return displaced_thermal(0.0, alpha)


def tensor(states: Sequence[GaussianState]) -> GaussianState:
    """Product state; means concatenated, covariances block-diagonal."""
    states = list(states)
    if not states:
        raise ValueError("tensor product of an empty list")
    mean = np.concatenate([s.mean for s in states])
    dim = mean.size
    cov = np.zeros((dim, dim))
    pos = 0
    for s in states:
        k = s.mean.size
        cov[pos:pos + k, pos:pos + k] = s.cov
        pos += k
    return GaussianState(mean, cov)


# --- symplectic maps --------------------------------------------------------


def dft_matrix(n: int) -> np.ndarray:
    """Unitary DFT ``F_kl = exp(2 pi i k l / n) / sqrt(n)``."""
    k = np.arange(n)
    return np.exp(2j * np.pi * np.outer(k, k) / n) / np.sqrt(n)


def multisplitter(n: int) -> SymplecticMap:
    """Passive ``n``-port interferometer ``a_k -> sum_l F_kl a_l`` with the unitary DFT.

    Output mode 0 carries ``(1/sqrt(n)) sum_l a_l``. Use ``.inverse()`` for the
    distributing direction, in which input mode 0 feeds every output with weight ``1/sqrt(n)``.
    """
    if n < 1:
        raise ValueError("multisplitter needs at least one mode")
    return SymplecticMap(realify(dft_matrix(n)))


def beam_splitter(theta: float, i: int, j: int, n_modes: int) -> SymplecticMap:
    """Beam splitter ``a_i -> cos(t) a_i + sin(t) a_j``, ``a_j -> -sin(t) a_i + cos(t) a_j``.

    With ``theta = pi/4`` the means ``(alpha, 0)`` become ``(alpha/sqrt2, -alpha/sqrt2)``.
    """
    if i == j:
        raise ValueError("beam splitter needs two distinct modes")
    c, s = np.cos(theta), np.sin(theta)
    u = np.array([[c, s], [-s, c]])
    return SymplecticMap(realify(u)).embed([i, j], n_modes)


def two_mode_squeezer(r: float, i: int, j: int, n_modes: int) -> SymplecticMap:
    """Two-mode squeezer ``a_i -> cosh(r) a_i - sinh(r) a_j^dag`` (and ``i <-> j``).

    With ``cosh(r)^2 = G`` and mode ``j`` in vacuum, mode ``i`` sees the
    quantum-limited phase-insensitive amplifier of power gain ``G``.
    """
    if i == j:
        raise ValueError("two-mode squeezer needs two distinct modes")
    ch, sh = np.cosh(r), np.sinh(r)
    u = np.array([[ch, 0.0], [0.0, ch]])
    v = np.array([[0.0, -sh], [-sh, 0.0]])
    return SymplecticMap(realify(u, v)).embed([i, j], n_modes)


def displacement(alpha: complex, mode: int = 0, n_modes: int = 1) -> SymplecticMap:
    alpha = complex(alpha)
    return SymplecticMap(np.eye(2), [alpha.real, alpha.imag]).embed([mode], n_modes)


# --- channels -----------------------------------------------------------------


def amplifier_channel(gain: float, kind: str = PHASE_PRESERVING) -> GaussianChannel:
    """Quantum-limited single-mode amplifier of power gain ``gain``.

    Phase-preserving: ``X = sqrt(G) I``, ``Y = (G-1)/4 I``. Phase-conjugating:
    ``X = sqrt(G) diag(1, -1)``, ``Y = (G+1)/4 I``. Both saturate the added-noise
    limit, so the output noise sum is ``G * input + |G -+ 1| / 2``.
    """
    if kind == PHASE_PRESERVING:
        if gain < 1:
            raise ValueError(f"phase-preserving gain must be >= 1, got {gain}")
        return GaussianChannel(np.sqrt(gain) * np.eye(2), (gain - 1) / 4 * np.eye(2))
    if kind == PHASE_CONJUGATING:
        if gain < 0:
            raise ValueError(f"gain must be non-negative, got {gain}")
        return GaussianChannel(np.sqrt(gain) * CONJUGATION, (gain + 1) / 4 * np.eye(2))
    raise ValueError(f"unknown amplifier kind {kind!r}")


def heterodyne_prepare_channel(scale: float, copies: int, conjugate: bool = True) -> GaussianChannel:
    """Measure one mode by heterodyne and prepare ``copies`` coherent states.

    The outcome ``alpha_o`` has the mode's mean and covariance ``cov + I/4``; each
    copy is prepared in the coherent state ``scale * conj(alpha_o)`` (or
    ``scale * alpha_o``). Averaged over outcomes the copies share the measured
    fluctuations exactly, which appear as identical off-diagonal blocks.
    """
    if copies < 1:
        raise ValueError("need at least one output copy")
    t = CONJUGATION if conjugate else np.eye(2)
    ones = np.ones((copies, 1))
    x = scale * np.kron(ones, t)
    y = 0.25 * np.eye(2 * copies) + scale**2 * 0.25 * np.kron(ones @ ones.T, np.eye(2))
    return GaussianChannel(x, y)


# --- actions -------------------------------------------------------------------


def apply_symplectic(state: GaussianState, smap: SymplecticMap, modes: Sequence[int] | None = None) -> GaussianState:
    """Apply ``smap`` to the whole state, or to ``modes`` if given."""
    if modes is not None:
        smap = smap.embed(modes, state.n_modes)
    if smap.n_modes != state.n_modes:
        raise ValueError(f"map on {smap.n_modes} modes applied to a {state.n_modes}-mode state")
    s = smap.matrix
    return GaussianState(s @ state.mean + smap.displacement, s @ state.cov @ s.T)


def apply_channel(state: GaussianState, channel: GaussianChannel, modes: Sequence[int]) -> GaussianState:
    """Apply ``channel`` to ``modes`` of ``state``.

    If the channel keeps the number of modes, the outputs replace the targets in
    place. Otherwise the targets are removed and the ``channel.n_out`` output modes
    are inserted where the first target was; other modes keep their order.
    """
    modes = _check_modes(modes, state.n_modes)
    if len(modes) != channel.n_in:
        raise ValueError(f"channel takes {channel.n_in} modes, got {len(modes)}")
    rest = [k for k in range(state.n_modes) if k not in modes]
    ti, ri = _quadrature_index(modes), _quadrature_index(rest)
    m_t, m_r = state.mean[ti], state.mean[ri]
    c = state.cov
    x = channel.X
    mean_out = x @ m_t + channel.d
    c_tt = x @ c[np.ix_(ti, ti)] @ x.T + channel.Y
    c_tr = x @ c[np.ix_(ti, ri)]
    c_rr = c[np.ix_(ri, ri)]

    n_out = channel.n_out
    if n_out == len(modes):
        out_pos = modes
        rest_pos = rest
    else:
        first = min(modes)
        before = [k for k in rest if k < first]
        after = [k for k in rest if k > first]
        out_pos = list(range(len(before), len(before) + n_out))
        rest_pos = list(range(len(before))) + list(range(len(before) + n_out, len(before) + n_out + len(after)))
    n_total = n_out + len(rest)
    oi, pi = _quadrature_index(out_pos), _quadrature_index(rest_pos)
    mean = np.zeros(2 * n_total)
    cov = np.zeros((2 * n_total, 2 * n_total))
    mean[oi], mean[pi] = mean_out, m_r
    cov[np.ix_(oi, oi)] = c_tt
    cov[np.ix_(oi, pi)] = c_tr
    cov[np.ix_(pi, oi)] = c_tr.T
    cov[np.ix_(pi, pi)] = c_rr
    return GaussianState(mean, 0.5 * (cov + cov.T))


def add_vacuum(state: GaussianState, k: int) -> GaussianState:
    """Append ``k`` vacuum modes after the existing ones."""
    if k < 0:
        raise ValueError("cannot add a negative number of modes")
    if k == 0:
        return state
    return tensor([state, vacuum(k)])


def partial_trace(state: GaussianState, keep: Sequence[int]) -> GaussianState:
    """Reduced state on ``keep`` (in the given order)."""
    keep = _check_modes(keep, state.n_modes)
    if not keep:
        raise ValueError("must keep at least one mode")
    idx = _quadrature_index(keep)
    return GaussianState(state.mean[idx], state.cov[np.ix_(idx, idx)])


def discard(state: GaussianState, modes: Sequence[int]) -> GaussianState:
    drop = set(_check_modes(modes, state.n_modes))
    return partial_trace(state, [k for k in range(state.n_modes) if k not in drop])


# --- statistics ---------------------------------------------------------------


def mode_stats(state: GaussianState, i: int) -> ModeStats:
    if not 0 <= i < state.n_modes:
        raise IndexError(f"mode index {i} out of range for {state.n_modes} modes")
    amp = state.mean[2 * i] + 1j * state.mean[2 * i + 1]
    return ModeStats(amp, state.cov[2 * i, 2 * i] + state.cov[2 * i + 1, 2 * i + 1])


def pairwise_number_correlations(state: GaussianState) -> np.ndarray:
    """Matrix ``C_ij = <b_i^dag b_j> - <b_i^dag><b_j>``.

    From the symmetrized covariance ``V``,
    ``C_ij = V[xi,xj] + V[yi,yj] + i (V[xi,yj] - V[yi,xj]) - delta_ij / 2``;
    the ``-1/2`` is the commutator term, so ``C_ii`` is the mode's ``nbar_eff``.
    """
    v = state.cov
    vxx, vyy = v[0::2, 0::2], v[1::2, 1::2]
    vxy, vyx = v[0::2, 1::2], v[1::2, 0::2]
    c = vxx + vyy + 1j * (vxy - vyx) - 0.5 * np.eye(state.n_modes)
    return 0.5 * (c + c.conj().T)
