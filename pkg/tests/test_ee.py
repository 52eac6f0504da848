import numpy as np
import pytest

from jtentangle import ee
from jtentangle.ee import EeParams
from jtentangle.entanglement import concurrence, von_neumann_entropy
from jtentangle.linalg import PureState, reduced_qubit

# lowest eigenvalue of the full dense Hamiltonian at N = 22 per mode
DENSE_ORACLE_L1_D0 = 0.7737871810686654
DENSE_ORACLE_L2_D1 = (-0.3525000777895011, 0.4984670499981987)


def test_params_and_dims():
    p = EeParams(1.0, 1.0, 0.0, 4)
    assert p.dims == (2, 5, 5) and p.mode_dim == 25
    with pytest.raises(ValueError):
        EeParams(omega=-1.0)


def test_hamiltonian_is_hermitian_and_decoupled_spectrum():
    p = EeParams(0.0, 1.5, 0.0, 6)
    h = ee.build_hamiltonian_two_mode(p)
    assert h.hermitian_hint
    w = np.linalg.eigvalsh(h.entries)
    # omega (n_a + n_b + 1), each level (n + 1)-fold per spin state for n <= N
    assert w[0] == pytest.approx(1.5)
    assert np.sum(np.isclose(w, 3.0)) == 4


def test_spin_factor_selection():
    assert ee.selected_spin_factor() == 0.5
    cj = ee.conserved_j_w(EeParams(1.3, 0.8, 0.4, 12))
    assert cj.spin_factor == 0.5 and not cj.tie
    assert cj.residuals[0.5] <= 1e-12
    assert cj.residuals[1.0] > 1e-3


def test_spin_factor_tie_at_zero_coupling():
    cj = ee.conserved_j_w(EeParams(0.0, 1.0, 0.0, 6))
    assert cj.tie and cj.spin_factor == 0.5


def test_no_conserved_candidate_raises():
    with pytest.raises(ValueError, match="no spin factor"):
        ee.conserved_j_w(EeParams(1.0, 1.0, 0.0, 6), candidates=(2.0,))


def test_j_commutes_with_h_on_interior():
    p = EeParams(2.0, 1.0, 0.7, 20)
    j = ee.conserved_j_w(p).operator
    h = ee.build_hamiltonian_two_mode(p)
    assert ee.interior_commutator_norm(j, h, ee.interior_mask(p)) <= 1e-10


def test_orbital_angular_momentum_matches_quadratures():
    p = EeParams(1.0, 1.0, 0.0, 8)
    q = ee.mode_quadratures(p)
    lw = q["q_theta"].entries @ q["p_eps"].entries - q["q_eps"].entries @ q["p_theta"].entries
    mask = ee.interior_mask(p, margin=1)
    diff = (lw - ee.angular_momentum_w(p).entries)[np.ix_(mask, mask)]
    assert np.abs(diff).max() < 1e-12


def test_block_spectrum_matches_full_diagonalization():
    p = EeParams(1.5, 1.0, 0.3, 12)
    full = np.linalg.eigvalsh(ee.build_hamiltonian_two_mode(p).entries)[:12]
    cj = ee.conserved_j_w(p)
    blocks = ee.block_decompose(ee.build_hamiltonian_two_mode(p), cj.operator, ee.interior_mask(p))
    spectra = [np.linalg.eigvalsh(b.block.entries) for b in blocks]
    union = np.sort(np.concatenate(spectra))[:12]
    assert np.abs(full - union).max() < 1e-8
    # blocks holding the low-lying states carry half-integer J; truncation-edge blocks need not
    low = [b for b, w in zip(blocks, spectra) if w.min() <= full[-1] + 1e-9]
    assert low and all(abs(2 * b.j_value - round(2 * b.j_value)) < 1e-9 and round(2 * b.j_value) % 2
                       for b in low)


def test_ground_pair_structure():
    p = EeParams(1.0, 1.0, 0.0, 25)
    pair = ee.ground_pair(p)
    assert pair.energy == pytest.approx(DENSE_ORACLE_L1_D0, abs=1e-9)
    assert pair.gap < 1e-10
    assert np.allclose(pair.psi_conj.amplitudes, pair.psi.amplitudes.conj())
    j = ee.conserved_j_w(p).operator
    assert j.expectation(pair.psi).real == pytest.approx(0.5, abs=1e-9)
    assert j.expectation(pair.psi_conj).real == pytest.approx(-0.5, abs=1e-9)
    assert abs(pair.psi.overlap(pair.psi_conj)) < 1e-9
    rho = reduced_qubit(pair.psi).entries
    assert rho[0, 1].imag > 0
    h = ee.build_hamiltonian_two_mode(p)
    assert h.expectation(pair.psi_conj).real == pytest.approx(pair.energy, abs=1e-10)


def test_ground_pair_requires_zero_field():
    with pytest.raises(ValueError):
        ee.ground_pair(EeParams(1.0, 1.0, 0.5, 10))


def test_field_ground_state_against_dense_oracle():
    g = ee.converged_ground_state(EeParams(2.0, 1.0, 1.0, 25))
    assert g.converged
    assert g.energy == pytest.approx(DENSE_ORACLE_L2_D1[0], abs=1e-9)
    assert g.entropy == pytest.approx(DENSE_ORACLE_L2_D1[1], abs=1e-8)


def test_converged_pair_metadata():
    pair = ee.converged_ground_pair(EeParams(2.0, 1.0, 0.0, 20))
    assert pair.converged and pair.truncation_error < 1e-8 and pair.n_fock > 20


def test_equal_superposition_entropy_independent_of_phase():
    pair = ee.ground_pair(EeParams(2.0, 1.0, 0.0, 25))
    c = 1 / np.sqrt(2)
    vals = [von_neumann_entropy(reduced_qubit(ee.superposition(pair, c, g))) for g in np.linspace(0, 2 * np.pi, 7)]
    assert np.ptp(vals) < 1e-10


def test_superposition_rejects_bad_c1():
    pair = ee.ground_pair(EeParams(1.0, 1.0, 0.0, 8))
    with pytest.raises(ValueError):
        ee.superposition(pair, -0.1, 0.0)


def test_angular_reduction_of_decoupled_state():
    p = EeParams(0.0, 1.0, 0.0, 8)
    red = ee.angular_qubit_reduction(ee.ground_pair(p).psi, p)
    assert red.weight == pytest.approx(1.0, abs=1e-10)
    assert concurrence(red.density) == pytest.approx(0.0, abs=1e-10)


def test_angular_reduction_keeps_ground_state_weight():
    p = EeParams(2.0, 1.0, 0.0, 30)
    red = ee.angular_qubit_reduction(ee.ground_pair(p).psi, p)
    assert red.weight == pytest.approx(1.0, abs=1e-8)
    assert red.m_spectrum[0] + red.m_spectrum[1] == pytest.approx(1.0, abs=1e-8)
    assert max(abs(red.m_spectrum[m]) for m in (-3, -2, -1, 2, 3)) < 1e-8


def test_angular_reduction_refuses_high_m_state():
    n = 6
    amps = np.zeros((2, n + 1, n + 1), dtype=complex)
    # (a^+ + i b^+)^2 |00> / 2 carries |m| = 2 only
    amps[0, 2, 0] = np.sqrt(2) / 2
    amps[0, 1, 1] = 1j
    amps[0, 0, 2] = -np.sqrt(2) / 2
    s = PureState(amps.ravel(), (2, n + 1, n + 1)).normalized()
    with pytest.raises(ValueError):
        ee.angular_qubit_reduction(s)
