import numpy as np
import pytest

from cvbroadcast import fock
from cvbroadcast.fock import (
    FockDensity,
    ResourceGuardError,
    add_vacuum_fock,
    apply_unitary,
    beam_splitter_fock,
    coherent_vectors,
    displaced_thermal_fock,
    displacement_fock,
    fidelity,
    fock_mode_stats,
    oracle_broadcast,
    oracle_phase_conjugate,
    oracle_purify,
    reduced,
    squeezer_fock,
    tensor_fock,
    thermal_fock,
    vacuum_fock,
)
from cvbroadcast.gaussian import (
    apply_symplectic,
    beam_splitter,
    displaced_thermal,
    pairwise_number_correlations,
    tensor,
    two_mode_squeezer,
    vacuum,
)


def _pure(vec, cutoff, n_modes=1):
    vec = np.asarray(vec, dtype=complex)
    return FockDensity(np.outer(vec, vec.conj()), n_modes, cutoff)


def test_thermal_vacuum():
    rho = thermal_fock(0.0, 6).rho
    expected = np.zeros((6, 6))
    expected[0, 0] = 1
    np.testing.assert_array_equal(rho, expected)


def test_thermal_half_photon():
    t = thermal_fock(0.5, 15)
    assert t.rho[0, 0].real == pytest.approx(2 / 3)
    assert t.trace_deficit == pytest.approx((1 / 3) ** 15, rel=1e-6)
    assert t.trace_deficit == pytest.approx(6.97e-8, rel=1e-3)


def test_thermal_one_photon():
    t = thermal_fock(1.0, 12)
    assert t.rho[0, 0].real == pytest.approx(0.5)
    assert t.trace_deficit == pytest.approx(2.0**-12, rel=1e-9)


def test_thermal_rejects_bad_args():
    with pytest.raises(ValueError):
        thermal_fock(-1, 5)
    with pytest.raises(ValueError):
        thermal_fock(1, 1)


def test_displacement_zero_is_identity():
    np.testing.assert_allclose(displacement_fock(0, 7).matrix, np.eye(7), atol=1e-15)


def test_displacement_makes_coherent_state():
    d = 25
    vac = vacuum_fock(d)
    out = apply_unitary(vac, displacement_fock(0.7 - 0.2j, d), [0])
    target = coherent_vectors([0.7 - 0.2j], d)[:, 0]
    assert fidelity(out, np.outer(target, target.conj())) == pytest.approx(1.0, abs=1e-10)


def test_beam_splitter_single_photon():
    d = 4
    one_zero = np.zeros(d * d)
    one_zero[1 * d + 0] = 1
    out = apply_unitary(_pure(one_zero, d, 2), beam_splitter_fock(np.pi / 4, d), [0, 1])
    expected = np.zeros(d * d)
    expected[1 * d + 0] = 1 / np.sqrt(2)
    expected[0 * d + 1] = -1 / np.sqrt(2)
    np.testing.assert_allclose(out.rho, np.outer(expected, expected), atol=1e-12)


def test_squeezer_photon_number():
    d, r = 20, 0.5
    out = apply_unitary(vacuum_fock(d, 2), squeezer_fock(r, d), [0, 1])
    assert fock_mode_stats(out, 0).nbar_eff == pytest.approx(np.sinh(r) ** 2, abs=1e-6)
    assert fock_mode_stats(out, 1).nbar_eff == pytest.approx(np.sinh(r) ** 2, abs=1e-6)


def test_truncation_warning():
    with pytest.warns(fock.TruncationWarning):
        displacement_fock(2.0, 6)
    with pytest.warns(fock.TruncationWarning):
        squeezer_fock(1.5, 6)


def test_padded_operator_is_contraction():
    u = displacement_fock(0.8, 8, pad=16).matrix
    assert np.linalg.norm(u, 2) <= 1 + 1e-12
    exact = displacement_fock(0.8, 40).matrix[:8, :8]
    np.testing.assert_allclose(u, exact, atol=1e-10)


def test_reduced_of_product():
    a, b = thermal_fock(0.3, 5), displaced_thermal_fock(0.1, 0.2, 5)
    np.testing.assert_allclose(reduced(tensor_fock([a, b]), [1]).rho, b.rho * a.trace, atol=1e-14)
    np.testing.assert_allclose(reduced(tensor_fock([a, b]), [0]).rho, a.rho * b.trace, atol=1e-14)


def test_fidelity_cases():
    t = thermal_fock(0.4, 10)
    assert fidelity(t, t) == pytest.approx(t.trace**2, abs=1e-12)
    normed = t.rho / t.trace
    assert fidelity(normed, normed) == pytest.approx(1.0, abs=1e-12)
    assert fidelity(vacuum_fock(30), thermal_fock(1.0, 30)) == pytest.approx(0.5, abs=1e-12)


def test_fock_mode_stats_thermal():
    # geometric tail: sum_{k<D} k q^k (1-q) with q = 1/3
    d, q = 15, 1 / 3
    truncated_mean = q * (1 - d * q ** (d - 1) + (d - 1) * q**d) / (1 - q)
    st = fock_mode_stats(thermal_fock(0.5, d))
    assert st.noise_sum == pytest.approx(0.5 + truncated_mean, abs=1e-13)
    assert abs(st.noise_sum - 1.0) < 1.2e-6
    assert st.amplitude == 0


def test_fock_mode_stats_displaced():
    st = fock_mode_stats(displaced_thermal_fock(0.3, 0.4 + 0.2j, 20))
    assert st.amplitude == pytest.approx(0.4 + 0.2j, abs=1e-6)
    assert st.noise_sum == pytest.approx(0.8, abs=1e-6)


def test_fock_correlations_match_gaussian():
    # split a displaced thermal state and compare <b_i^dag b_j> - <b_i^dag><b_j> with the Gaussian formula
    d, alpha, nbar, theta = 20, 0.3 - 0.1j, 0.6, 0.4
    g = apply_symplectic(tensor([displaced_thermal(nbar, alpha), vacuum()]), beam_splitter(theta, 0, 1, 2))
    c_gauss = pairwise_number_correlations(g)
    f = apply_unitary(add_vacuum_fock(displaced_thermal_fock(nbar, alpha, d), 1), beam_splitter_fock(theta, d), [0, 1])
    a = fock.ladder(d)
    eye = np.eye(d)
    ops = [np.kron(a, eye), np.kron(eye, a)]
    mean = [np.trace(f.rho @ op) for op in ops]
    c_fock = np.array([[np.trace(f.rho @ ops[i].conj().T @ ops[j]) - np.conj(mean[i]) * mean[j] for j in range(2)]
                       for i in range(2)])
    np.testing.assert_allclose(c_fock, c_gauss, atol=1e-6)
    np.testing.assert_allclose(mean, g.amplitudes, atol=1e-6)


def test_fock_squeezer_matches_gaussian_amplifier():
    d, alpha, r = 24, 0.25, 0.5
    g = apply_symplectic(tensor([displaced_thermal(0.2, alpha), vacuum()]), two_mode_squeezer(r, 0, 1, 2))
    f = apply_unitary(add_vacuum_fock(displaced_thermal_fock(0.2, alpha, d), 1), squeezer_fock(r, d), [0, 1])
    st = fock_mode_stats(f, 0)
    assert st.amplitude == pytest.approx(g.amplitudes[0], abs=1e-6)
    assert st.noise_sum == pytest.approx(g.cov[0, 0] + g.cov[1, 1], abs=1e-5)


def test_passive_stage_conserves_photons():
    d = 12
    state = tensor_fock([displaced_thermal_fock(0.5, 0.3, d)] * 2)
    after = apply_unitary(state, beam_splitter_fock(np.pi / 4, d), [0, 1])
    n_before = sum(fock_mode_stats(state, k).nbar_eff + abs(fock_mode_stats(state, k).amplitude) ** 2 for k in range(2))
    n_after = sum(fock_mode_stats(after, k).nbar_eff + abs(fock_mode_stats(after, k).amplitude) ** 2 for k in range(2))
    assert n_after == pytest.approx(n_before, abs=10 * state.trace_deficit + 1e-8)


def test_resource_guard_dimension():
    with pytest.raises(ResourceGuardError):
        tensor_fock([vacuum_fock(30)] * 3)


def test_oracle_broadcast_2_to_2():
    r = oracle_broadcast(2, 2, 0.5, 0.3, 12)
    assert all(abs(c.nbar_eff - 0.25) <= 2e-3 for c in r.copies)
    assert r.min_fidelity >= 0.999


def test_oracle_broadcast_2_to_3():
    r = oracle_broadcast(2, 3, 0.5, 0.2, 10)
    assert all(abs(c.nbar_eff - (0.25 + 1 / 6)) <= 5e-3 for c in r.copies)
    assert r.min_fidelity >= 0.999
    assert all(abs(c.amplitude - 0.2) <= 1e-2 * 1.2 for c in r.copies)


def test_oracle_broadcast_coherent_cloning():
    r = oracle_broadcast(1, 2, 0.0, 0.4, 12)
    assert all(abs(c.nbar_eff - 0.5) <= 2e-3 for c in r.copies)


def test_oracle_coherent_cloning_converges_in_cutoff():
    errs = [abs(oracle_broadcast(1, 2, 0.0, 0.4, d).nbar_out - 0.5) for d in (8, 10, 12, 14)]
    assert all(a > b for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 1e-3


def test_oracle_purify_cases():
    r = oracle_purify(2, 1, 1.0, 0.3, 14)
    assert abs(r.nbar_out - 0.5) <= 2e-3
    r = oracle_purify(3, 1, 0.6, 0.0, 10)
    assert abs(r.nbar_out - 0.2) <= 5e-3
    r = oracle_purify(2, 2, 1.0, 0.0, 14)
    assert all(abs(c.nbar_eff - 0.5) <= 2e-3 for c in r.copies)


def test_oracle_deficit_is_reported_not_renormalized():
    r = oracle_purify(2, 1, 1.0, 0.3, 14)
    assert 0 < r.trace_deficit < fock.DEFICIT_BUDGET


def test_oracle_occupation_guard():
    with pytest.raises(ResourceGuardError, match="occupation"):
        oracle_broadcast(2, 3, 1.0, 0.3, 6)
    with pytest.raises(ResourceGuardError):
        oracle_broadcast(3, 4, 0.1, 0.0, 6)


def test_oracle_phase_conjugate_two_to_one():
    r = oracle_phase_conjugate(2, 1, 1.0, 0.3, 12, 100_000, seed=7)
    assert r.gamma_out == pytest.approx(1.5, abs=0.01)
    stderr = r.extras["amplitude_stderr"]
    assert abs(r.copies[0].amplitude - 0.3) <= max(3 * stderr, 1e-2 * 1.3)


def test_oracle_phase_conjugate_vacuum():
    r = oracle_phase_conjugate(1, 1, 0.0, 0.0, 12, 100_000, seed=11)
    assert r.gamma_out == pytest.approx(1.5, abs=0.01)


def test_oracle_phase_conjugate_copies_correlated():
    r = oracle_phase_conjugate(2, 2, 1.0, 0.2j, 12, 50_000, seed=3)
    # shared fluctuations: C_01 = (gamma + 1/2)/N = 1.0
    assert r.cross_correlation.real == pytest.approx(1.0, abs=0.03)
    assert r.copies[0].amplitude == pytest.approx(-0.2j, abs=0.02)


def test_oracle_phase_conjugate_is_seeded():
    a = oracle_phase_conjugate(2, 1, 1.0, 0.3, 10, 20_000, seed=5)
    b = oracle_phase_conjugate(2, 1, 1.0, 0.3, 10, 20_000, seed=5)
    assert a.gamma_out == b.gamma_out
    with pytest.raises(ValueError):
        oracle_phase_conjugate(2, 1, 1.0, 0.3, 10, 100)
