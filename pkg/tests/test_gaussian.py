import numpy as np
import pytest

from cvbroadcast.gaussian import (
    PHASE_CONJUGATING,
    PHASE_PRESERVING,
    GaussianChannel,
    GaussianState,
    ModeStats,
    SymplecticMap,
    add_vacuum,
    amplifier_channel,
    apply_channel,
    apply_symplectic,
    beam_splitter,
    coherent,
    displaced_thermal,
    heterodyne_prepare_channel,
    mode_stats,
    multisplitter,
    omega,
    pairwise_number_correlations,
    partial_trace,
    tensor,
    two_mode_squeezer,
    vacuum,
)

ALPHA = 0.3 + 0.1j


def test_displaced_thermal_vacuum():
    s = displaced_thermal(0, 0)
    np.testing.assert_array_equal(s.mean, [0, 0])
    np.testing.assert_array_equal(s.cov, 0.25 * np.eye(2))


def test_displaced_thermal_noise_and_amplitude():
    st = mode_stats(displaced_thermal(1, ALPHA), 0)
    assert st.noise_sum == pytest.approx(1.5, abs=1e-15)
    assert st.amplitude == ALPHA


def test_displaced_thermal_half_photon():
    s = displaced_thermal(0.5, 0)
    np.testing.assert_allclose(s.cov, 0.5 * np.eye(2))
    assert mode_stats(s, 0).noise_sum == pytest.approx(1.0)


def test_negative_nbar_rejected():
    with pytest.raises(ValueError):
        displaced_thermal(-0.1)


def test_state_validation():
    with pytest.raises(ValueError, match="symmetric"):
        GaussianState([0, 0], [[0.25, 0.1], [0.0, 0.25]])
    with pytest.raises(ValueError, match="uncertainty"):
        GaussianState([0, 0], 0.2 * np.eye(2))
    with pytest.raises(ValueError):
        GaussianState([0, 0, 0], np.eye(3))


def test_state_arrays_are_read_only():
    s = vacuum(2)
    with pytest.raises(ValueError):
        s.cov[0, 0] = 1.0


def test_tensor_vacuum():
    s = tensor([vacuum(), vacuum()])
    np.testing.assert_array_equal(s.cov, 0.25 * np.eye(4))


def test_tensor_product_thermal():
    s = tensor([displaced_thermal(1, ALPHA)] * 2)
    assert [mode_stats(s, k).noise_sum for k in range(2)] == pytest.approx([1.5, 1.5])
    np.testing.assert_array_equal(s.cov[0:2, 2:4], 0)


def test_tensor_of_two_inputs_has_gamma_one():
    s = tensor([displaced_thermal(0.5, 0.4)] * 2)
    for k in range(2):
        st = mode_stats(s, k)
        assert st.amplitude == pytest.approx(0.4)
        assert st.noise_sum == pytest.approx(1.0)


def test_tensor_empty():
    with pytest.raises(ValueError):
        tensor([])


def test_multisplitter_one_is_identity():
    np.testing.assert_allclose(multisplitter(1).matrix, np.eye(2), atol=1e-15)


def test_multisplitter_two_concentrates():
    s = apply_symplectic(tensor([coherent(ALPHA)] * 2), multisplitter(2))
    assert mode_stats(s, 0).amplitude == pytest.approx(np.sqrt(2) * ALPHA, abs=1e-14)
    assert abs(mode_stats(s, 1).amplitude) < 1e-14


def test_multisplitter_three_against_explicit_matrix():
    # 6x6 realified DFT written out entry by entry
    big = np.zeros((6, 6))
    for k in range(3):
        for l in range(3):
            ang = 2 * np.pi * k * l / 3
            c, s = np.cos(ang) / np.sqrt(3), np.sin(ang) / np.sqrt(3)
            big[2 * k:2 * k + 2, 2 * l:2 * l + 2] = [[c, -s], [s, c]]
    np.testing.assert_allclose(multisplitter(3).matrix, big, atol=1e-15)
    mean = np.tile([ALPHA.real, ALPHA.imag], 3)
    out = big @ mean
    np.testing.assert_allclose(out[:2], np.sqrt(3) * np.array([ALPHA.real, ALPHA.imag]), atol=1e-14)
    np.testing.assert_allclose(out[2:], 0, atol=1e-14)
    s = apply_symplectic(tensor([coherent(ALPHA)] * 3), multisplitter(3))
    np.testing.assert_allclose(s.mean, out, atol=1e-14)


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
def test_multisplitter_orthogonal_and_symplectic(n):
    s = multisplitter(n).matrix
    assert np.abs(s.T @ s - np.eye(2 * n)).max() <= 1e-10
    assert np.abs(s @ omega(n) @ s.T - omega(n)).max() <= 1e-10


def test_multisplitter_rejects_zero():
    with pytest.raises(ValueError):
        multisplitter(0)


def test_multisplitter_inverse_distributes_evenly():
    state = tensor([coherent(np.sqrt(4) * ALPHA), vacuum(3)])
    out = apply_symplectic(state, multisplitter(4).inverse())
    np.testing.assert_allclose(out.amplitudes, [ALPHA] * 4, atol=1e-14)


def test_beam_splitter_cases():
    np.testing.assert_allclose(beam_splitter(0, 0, 1, 2).matrix, np.eye(4), atol=1e-15)
    swapped = apply_symplectic(tensor([coherent(ALPHA), vacuum()]), beam_splitter(np.pi / 2, 0, 1, 2))
    assert abs(swapped.amplitudes[0]) < 1e-15
    assert abs(swapped.amplitudes[1]) == pytest.approx(abs(ALPHA))
    half = apply_symplectic(tensor([coherent(ALPHA), vacuum()]), beam_splitter(np.pi / 4, 0, 1, 2))
    np.testing.assert_allclose(half.amplitudes, [ALPHA / np.sqrt(2), -ALPHA / np.sqrt(2)], atol=1e-15)
    with pytest.raises(ValueError):
        beam_splitter(0.1, 1, 1, 2)


def test_two_mode_squeezer_identity_and_amplification():
    np.testing.assert_allclose(two_mode_squeezer(0, 0, 1, 2).matrix, np.eye(4), atol=1e-15)
    r = np.arccosh(np.sqrt(2))
    out = apply_symplectic(tensor([coherent(ALPHA), vacuum()]), two_mode_squeezer(r, 0, 1, 2))
    st = mode_stats(out, 0)
    assert st.amplitude == pytest.approx(np.sqrt(2) * ALPHA, abs=1e-14)
    # cosh^2 * 1/2 from the signal plus sinh^2 * 1/2 from the idler vacuum
    assert st.noise_sum == pytest.approx(1.5, abs=1e-14)


def test_two_mode_squeezer_is_symplectic_unit_det():
    s = two_mode_squeezer(0.7, 0, 1, 2).matrix
    assert np.abs(s @ omega(2) @ s.T - omega(2)).max() <= 1e-10
    assert np.linalg.det(s) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        two_mode_squeezer(0.7, 0, 0, 2)


def test_two_mode_squeezer_matches_definition():
    # a -> cosh a - sinh b^dag: x_a -> ch x_a - sh x_b, y_a -> ch y_a + sh y_b
    r = 0.4
    ch, sh = np.cosh(r), np.sinh(r)
    expected = np.array([
        [ch, 0, -sh, 0],
        [0, ch, 0, sh],
        [-sh, 0, ch, 0],
        [0, sh, 0, ch],
    ])
    np.testing.assert_allclose(two_mode_squeezer(r, 0, 1, 2).matrix, expected, atol=1e-15)


def test_symplectic_validation():
    with pytest.raises(ValueError):
        SymplecticMap(2 * np.eye(2))


def test_amplifier_identity():
    ch = amplifier_channel(1.0)
    np.testing.assert_array_equal(ch.Y, 0)
    np.testing.assert_array_equal(ch.X, np.eye(2))


def test_amplifier_gain_three_halves():
    out = apply_channel(displaced_thermal(1.0), amplifier_channel(1.5), [0])
    assert mode_stats(out, 0).noise_sum == pytest.approx(2.5)


def test_conjugating_amplifier_on_vacuum():
    out = apply_channel(vacuum(), amplifier_channel(1.0, PHASE_CONJUGATING), [0])
    assert mode_stats(out, 0).noise_sum == pytest.approx(1.5)


def test_conjugating_amplifier_conjugates():
    out = apply_channel(coherent(ALPHA), amplifier_channel(1.0, PHASE_CONJUGATING), [0])
    assert mode_stats(out, 0).amplitude == pytest.approx(ALPHA.conjugate())


def test_amplifier_rejects_attenuation():
    with pytest.raises(ValueError):
        amplifier_channel(0.5, PHASE_PRESERVING)
    with pytest.raises(ValueError):
        amplifier_channel(2.0, "sideways")


def test_channel_rejects_non_cp_noise():
    with pytest.raises(ValueError, match="completely positive"):
        GaussianChannel(np.sqrt(2) * np.eye(2), 0.1 * np.eye(2))


def test_heterodyne_prepare_channel_is_cp():
    for copies in (1, 2, 5):
        assert heterodyne_prepare_channel(1 / np.sqrt(2), copies).cp_margin() >= -1e-10


def test_apply_channel_changes_mode_count_in_place():
    state = tensor([displaced_thermal(0.2, 0.1), coherent(ALPHA), displaced_thermal(0.7, -0.2)])
    out = apply_channel(state, heterodyne_prepare_channel(1.0, 3), [1])
    assert out.n_modes == 5
    np.testing.assert_allclose(out.amplitudes, [0.1, *[ALPHA.conjugate()] * 3, -0.2], atol=1e-15)
    assert mode_stats(out, 0).noise_sum == pytest.approx(0.7)
    assert mode_stats(out, 4).noise_sum == pytest.approx(1.2)


def test_apply_symplectic_on_vacuum_is_passive():
    out = apply_symplectic(vacuum(4), multisplitter(4))
    np.testing.assert_allclose(out.cov, 0.25 * np.eye(8), atol=1e-15)


def test_partial_trace_of_product():
    a, b = displaced_thermal(0.3, ALPHA), displaced_thermal(1.2, -0.5)
    kept = partial_trace(tensor([a, b]), [1])
    np.testing.assert_array_equal(kept.cov, b.cov)
    np.testing.assert_array_equal(kept.mean, b.mean)


def test_add_vacuum_round_trip():
    s = displaced_thermal(0.4, ALPHA)
    back = partial_trace(add_vacuum(s, 3), [0])
    np.testing.assert_array_equal(back.cov, s.cov)
    np.testing.assert_array_equal(back.mean, s.mean)


def test_mode_index_errors():
    with pytest.raises(IndexError):
        mode_stats(vacuum(2), 2)
    with pytest.raises(IndexError):
        partial_trace(vacuum(2), [3])


def test_mode_stats_vacuum():
    st = mode_stats(vacuum(), 0)
    assert st.amplitude == 0 and st.noise_sum == 0.5 and st.nbar_eff == 0


def test_mode_stats_concentrated():
    s = apply_symplectic(tensor([displaced_thermal(1, ALPHA)] * 2), multisplitter(2))
    st = mode_stats(s, 0)
    assert st.amplitude == pytest.approx(np.sqrt(2) * ALPHA)
    assert st.noise_sum == pytest.approx(1.5)


def test_mode_stats_rejects_sub_vacuum():
    with pytest.raises(ValueError):
        ModeStats(0j, 0.3)


def test_correlations_of_product_are_diagonal():
    c = pairwise_number_correlations(tensor([displaced_thermal(0.3, ALPHA), displaced_thermal(1.1)]))
    np.testing.assert_allclose(c, np.diag([0.3, 1.1]), atol=1e-15)


def test_correlations_of_split_thermal():
    # thermal nbar on a balanced splitter with vacuum: <b_i^dag b_j> = nbar/2 * (+-1)
    out = apply_symplectic(tensor([displaced_thermal(1.0), vacuum()]), beam_splitter(np.pi / 4, 0, 1, 2))
    np.testing.assert_allclose(pairwise_number_correlations(out), [[0.5, -0.5], [-0.5, 0.5]], atol=1e-15)
