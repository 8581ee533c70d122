import math

import numpy as np
import pytest

from qpad.pad import ALL_AUX_SECRETS, AuxSecret
from qpad.sim import (
    DensityMatrix,
    density_of,
    gate_matrix,
    ket,
    maximally_mixed,
    trace_distance,
)
from qpad.tomography import (
    ChiMatrix,
    CountTable,
    ReconstructionError,
    TomographyPlan,
    _design,
    _solve_linear_inversion,
    apply_chi,
    channel_of_gate_decrypted,
    channel_of_gate_server_view,
    chi_of_unitary,
    collect,
    depolarizing_chi,
    ideal_gate_channel,
    ideal_gate_chi,
    monte_carlo_uncertainty,
    pauli_labels,
    pauli_matrices,
    process_fidelity,
    r_gadget_bin_channel,
    reconstruct_chi,
    tp_residual,
)
from tests.conftest import random_state

ONE_QUBIT_GATES = ("X", "Z", "H", "P", "R")
ALL_GATES = ONE_QUBIT_GATES + ("CNOT",)


def conjugation(kind):
    u = gate_matrix(kind)

    def channel(rho: DensityMatrix) -> DensityMatrix:
        return DensityMatrix(rho.n_qubits, u @ rho.matrix @ u.conj().T)

    return channel


class TestPauliBasis:
    def test_labels_lexicographic(self):
        assert pauli_labels(1) == ("I", "X", "Y", "Z")
        assert pauli_labels(2)[:5] == ("II", "IX", "IY", "IZ", "XI")
        assert len(pauli_labels(2)) == 16

    def test_matrices_match_labels(self):
        mats = pauli_matrices(2)
        x, z = gate_matrix("X"), gate_matrix("Z")
        # first label character is the more significant factor
        idx_xz = pauli_labels(2).index("XZ")
        assert np.allclose(mats[idx_xz], np.kron(x, z))

    def test_orthogonality(self):
        mats = pauli_matrices(2)
        gram = np.einsum("mab,nba->mn", mats, mats)
        assert np.allclose(gram, 4 * np.eye(16), atol=1e-12)

    def test_register_size_check(self):
        with pytest.raises(ValueError, match="1 or 2"):
            pauli_labels(3)


class TestPlan:
    def test_single_qubit_shapes(self):
        plan = TomographyPlan(1)
        assert plan.exact
        assert plan.n_inputs == 6 and plan.n_settings == 3 and plan.n_outcomes == 2
        assert plan.input_kets.shape == (6, 2)
        assert plan.projectors.shape == (3, 2, 2, 2)
        assert plan.input_labels[:2] == ("0", "1")
        assert plan.setting_labels == ("X", "Y", "Z")

    def test_two_qubit_shapes(self):
        plan = TomographyPlan(2, shots=100)
        assert not plan.exact
        assert plan.n_inputs == 36 and plan.n_settings == 9 and plan.n_outcomes == 4
        assert plan.input_labels[0] == "0,0"
        assert "ZX" in plan.setting_labels

    def test_projectors_resolve_identity(self):
        for n in (1, 2):
            projs = TomographyPlan(n).projectors
            for s in range(projs.shape[0]):
                assert np.allclose(projs[s].sum(axis=0), np.eye(2**n), atol=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError, match="1 or 2"):
            TomographyPlan(3)
        with pytest.raises(ValueError, match="shots"):
            TomographyPlan(1, shots=-5)


class TestCountTable:
    def test_shape_checked(self):
        with pytest.raises(ValueError, match="shape"):
            CountTable(1, 0, np.zeros((6, 3, 3)))

    def test_negative_checked(self):
        values = np.full((6, 3, 2), 0.5)
        values[0, 0, 0] = -0.5
        with pytest.raises(ValueError, match="negative"):
            CountTable(1, 0, values)

    def test_exact_rows_must_be_distributions(self):
        with pytest.raises(ValueError, match="sum to 1"):
            CountTable(1, 0, np.full((6, 3, 2), 0.4))


class TestCollect:
    def test_exact_identity_channel(self):
        plan = TomographyPlan(1)
        table = collect(ideal_gate_channel("X"), plan)
        assert table.exact
        # |0> through X, read in Z: outcome 1 with certainty
        i = plan.input_labels.index("0")
        s = plan.setting_labels.index("Z")
        assert table.values[i, s] == pytest.approx([0.0, 1.0], abs=1e-12)

    def test_sampled_counts_sum_to_shots(self):
        plan = TomographyPlan(1, shots=500)
        table = collect(ideal_gate_channel("H"), plan, seed=3)
        assert np.all(table.values.sum(axis=2) == 500)

    def test_sampled_deterministic_per_seed(self):
        plan = TomographyPlan(1, shots=200)
        a = collect(ideal_gate_channel("H"), plan, seed=7)
        b = collect(ideal_gate_channel("H"), plan, seed=7)
        c = collect(ideal_gate_channel("H"), plan, seed=8)
        assert np.array_equal(a.values, b.values)
        assert not np.array_equal(a.values, c.values)

    def test_seed_validation(self):
        with pytest.raises(ValueError, match="seed"):
            collect(ideal_gate_channel("X"), TomographyPlan(1), seed=-1)


class TestChiMatrix:
    def test_identity_chi(self):
        chi = chi_of_unitary(np.eye(2))
        expected = np.zeros((4, 4))
        expected[0, 0] = 1.0
        assert np.allclose(chi.matrix, expected, atol=1e-12)

    def test_x_chi(self):
        chi = chi_of_unitary(gate_matrix("X"))
        assert chi.matrix[1, 1] == pytest.approx(1.0)

    def test_h_chi_frozen(self):
        chi = ideal_gate_chi("H").matrix
        expected = np.zeros((4, 4))
        for m in (1, 3):
            for n in (1, 3):
                expected[m, n] = 0.5
        assert np.allclose(chi, expected, atol=1e-12)

    def test_r_chi_frozen(self):
        chi = ideal_gate_chi("R").matrix
        c2, s2 = math.cos(math.pi / 8) ** 2, math.sin(math.pi / 8) ** 2
        assert chi[0, 0] == pytest.approx(c2, abs=1e-12)
        assert chi[3, 3] == pytest.approx(s2, abs=1e-12)
        assert chi[0, 3] == pytest.approx(1j * math.sin(math.pi / 4) / 2, abs=1e-12)
        assert abs(chi[1, 1]) < 1e-12 and abs(chi[2, 2]) < 1e-12

    def test_depolarizing_chi(self):
        chi = depolarizing_chi(2)
        assert np.allclose(chi.matrix, np.eye(16) / 16)

    def test_unit_trace_required(self):
        with pytest.raises(ValueError, match="trace"):
            ChiMatrix(1, np.eye(4))

    def test_hermitian_required(self):
        m = np.zeros((4, 4), dtype=complex)
        m[0, 0] = 1.0
        m[0, 1] = 0.3
        with pytest.raises(ValueError, match="Hermitian"):
            ChiMatrix(1, m)

    def test_psd_required(self):
        with pytest.raises(ValueError, match="negative"):
            ChiMatrix(1, np.diag([1.5, -0.5, 0.0, 0.0]))

    def test_labels(self):
        assert ideal_gate_chi("CNOT").labels == pauli_labels(2)


class TestApplyChi:
    def test_matches_conjugation(self, rng):
        for kind in ALL_GATES:
            n = 2 if kind == "CNOT" else 1
            chi = ideal_gate_chi(kind)
            state = random_state(n, rng)
            out = apply_chi(chi, density_of(state))
            expected = conjugation(kind)(density_of(state))
            assert trace_distance(out, expected) <= 1e-12

    def test_depolarizing_action(self, rng):
        for n in (1, 2):
            rho = density_of(random_state(n, rng))
            out = apply_chi(depolarizing_chi(n), rho)
            assert trace_distance(out, maximally_mixed(n)) <= 1e-12

    def test_size_mismatch(self):
        with pytest.raises(ValueError, match="register sizes"):
            apply_chi(ideal_gate_chi("X"), maximally_mixed(2))

    def test_tp_residual_of_ideals(self):
        for kind in ALL_GATES:
            assert tp_residual(ideal_gate_chi(kind)) <= 1e-12


class TestGateChannels:
    def test_decrypted_views_reproduce_gates(self, rng):
        for kind in ALL_GATES:
            n = 2 if kind == "CNOT" else 1
            channel = channel_of_gate_decrypted(kind)
            oracle = conjugation(kind)
            for _ in range(6):
                rho = density_of(random_state(n, rng))
                assert trace_distance(channel(rho), oracle(rho)) <= 1e-12

    def test_server_views_are_depolarizing(self, rng):
        for kind in ALL_GATES:
            n = 2 if kind == "CNOT" else 1
            channel = channel_of_gate_server_view(kind)
            for _ in range(6):
                rho = density_of(random_state(n, rng))
                assert trace_distance(channel(rho), maximally_mixed(n)) <= 1e-12

    def test_bin_channels_reproduce_r(self, rng):
        oracle = conjugation("R")
        for secret in ALL_AUX_SECRETS:
            for c in (0, 1):
                channel = r_gadget_bin_channel(secret, c)
                for _ in range(4):
                    rho = density_of(random_state(1, rng))
                    assert trace_distance(channel(rho), oracle(rho)) <= 1e-12

    def test_bin_channel_validates_c(self):
        with pytest.raises(ValueError, match="c must be"):
            r_gadget_bin_channel(AuxSecret(0, 0), 2)


class TestExactReconstruction:
    def test_all_gates_decrypted(self):
        for kind in ALL_GATES:
            n = 2 if kind == "CNOT" else 1
            plan = TomographyPlan(n)
            table = collect(channel_of_gate_decrypted(kind), plan)
            chi = reconstruct_chi(table, plan)
            assert process_fidelity(chi, ideal_gate_chi(kind)) >= 1 - 1e-9
            assert tp_residual(chi) <= 1e-6

    def test_all_gates_server_view(self):
        for kind in ALL_GATES:
            n = 2 if kind == "CNOT" else 1
            plan = TomographyPlan(n)
            table = collect(channel_of_gate_server_view(kind), plan)
            chi = reconstruct_chi(table, plan)
            assert process_fidelity(chi, depolarizing_chi(n)) >= 1 - 1e-9

    def test_reconstructed_channel_acts_correctly(self, rng):
        plan = TomographyPlan(1)
        table = collect(channel_of_gate_decrypted("R"), plan)
        chi = reconstruct_chi(table, plan)
        state = random_state(1, rng)
        out = apply_chi(chi, density_of(state))
        expected = conjugation("R")(density_of(state))
        assert trace_distance(out, expected) <= 1e-8

    def test_plan_mismatch_rejected(self):
        plan = TomographyPlan(1)
        table = collect(channel_of_gate_decrypted("X"), plan)
        with pytest.raises(ValueError, match="does not match"):
            reconstruct_chi(table, TomographyPlan(1, shots=10))

    def test_rank_deficient_design_rejected(self):
        # starving the solver of most rows leaves chi underdetermined
        a_mat = _design(1)["A"]
        with pytest.raises(ReconstructionError, match="rank"):
            _solve_linear_inversion(a_mat[:8], np.zeros(8), 2)


class TestSampledReconstruction:
    def test_single_qubit_gates(self):
        for kind in ("H", "R"):
            plan = TomographyPlan(1, shots=10000)
            table = collect(channel_of_gate_decrypted(kind), plan, seed=1)
            chi = reconstruct_chi(table, plan)
            assert process_fidelity(chi, ideal_gate_chi(kind)) >= 0.99
            assert tp_residual(chi) <= 1e-6

    def test_cnot(self):
        plan = TomographyPlan(2, shots=10000)
        table = collect(channel_of_gate_decrypted("CNOT"), plan, seed=1)
        chi = reconstruct_chi(table, plan)
        assert process_fidelity(chi, ideal_gate_chi("CNOT")) >= 0.99
        assert tp_residual(chi) <= 1e-6

    def test_deterministic(self):
        plan = TomographyPlan(1, shots=2000)
        table = collect(channel_of_gate_decrypted("P"), plan, seed=5)
        a = reconstruct_chi(table, plan).matrix
        b = reconstruct_chi(table, plan).matrix
        assert np.array_equal(a, b)

    def test_server_view_sampled(self):
        plan = TomographyPlan(1, shots=10000)
        table = collect(channel_of_gate_server_view("H"), plan, seed=2)
        chi = reconstruct_chi(table, plan)
        assert process_fidelity(chi, depolarizing_chi(1)) >= 0.99


class TestProcessFidelity:
    def test_self_fidelity(self):
        for kind in ("H", "CNOT"):
            chi = ideal_gate_chi(kind)
            assert process_fidelity(chi, chi) == pytest.approx(1.0, abs=1e-12)

    def test_mixed_self_fidelity(self):
        depol = depolarizing_chi(1)
        assert process_fidelity(depol, depol) == pytest.approx(1.0, abs=1e-9)

    def test_unitary_vs_depolarizing(self):
        # overlap of any unitary chi with the flat chi is 1/4^n
        for kind, n in (("H", 1), ("CNOT", 2)):
            f = process_fidelity(depolarizing_chi(n), ideal_gate_chi(kind))
            assert f == pytest.approx(1.0 / 4**n, abs=1e-9)
            # the square-root formula agrees when the arguments swap
            g = process_fidelity(ideal_gate_chi(kind), depolarizing_chi(n))
            assert g == pytest.approx(1.0 / 4**n, abs=1e-9)

    def test_orthogonal_unitaries(self):
        assert process_fidelity(ideal_gate_chi("X"), ideal_gate_chi("Z")) <= 1e-12

    def test_size_mismatch(self):
        with pytest.raises(ValueError, match="register sizes"):
            process_fidelity(ideal_gate_chi("X"), ideal_gate_chi("CNOT"))


class TestMonteCarlo:
    def test_identity_resampler_has_zero_spread(self):
        plan = TomographyPlan(1, shots=1000)
        table = collect(channel_of_gate_decrypted("H"), plan, seed=0)
        mean, std = monte_carlo_uncertainty(
            table, plan, ideal_gate_chi("H"), iterations=3, resample="identity"
        )
        assert std == 0.0
        assert mean == pytest.approx(
            process_fidelity(reconstruct_chi(table, plan), ideal_gate_chi("H")),
            abs=1e-12,
        )

    def test_poisson_statistics(self):
        plan = TomographyPlan(1, shots=10000)
        table = collect(channel_of_gate_decrypted("R"), plan, seed=0)
        mean, std = monte_carlo_uncertainty(
            table, plan, ideal_gate_chi("R"), iterations=25, seed=0
        )
        assert 0.99 <= mean <= 1.0
        assert 0.0 < std <= 0.01

    def test_spread_shrinks_with_shots(self):
        results = {}
        for shots in (200, 20000):
            plan = TomographyPlan(1, shots=shots)
            table = collect(channel_of_gate_decrypted("H"), plan, seed=4)
            _, std = monte_carlo_uncertainty(
                table, plan, ideal_gate_chi("H"), iterations=20, seed=4
            )
            results[shots] = std
        assert results[20000] < results[200]

    def test_deterministic(self):
        plan = TomographyPlan(1, shots=1000)
        table = collect(channel_of_gate_decrypted("P"), plan, seed=2)
        a = monte_carlo_uncertainty(table, plan, ideal_gate_chi("P"), iterations=5, seed=9)
        b = monte_carlo_uncertainty(table, plan, ideal_gate_chi("P"), iterations=5, seed=9)
        assert a == b

    def test_rejects_exact_table(self):
        plan = TomographyPlan(1)
        table = collect(channel_of_gate_decrypted("X"), plan)
        with pytest.raises(ValueError, match="counted data"):
            monte_carlo_uncertainty(table, plan, ideal_gate_chi("X"))

    def test_rejects_too_few_iterations(self):
        plan = TomographyPlan(1, shots=100)
        table = collect(channel_of_gate_decrypted("X"), plan)
        with pytest.raises(ValueError, match="iterations"):
            monte_carlo_uncertainty(table, plan, ideal_gate_chi("X"), iterations=1)

    def test_rejects_unknown_resampler(self):
        plan = TomographyPlan(1, shots=100)
        table = collect(channel_of_gate_decrypted("X"), plan)
        with pytest.raises(ValueError, match="resampler"):
            monte_carlo_uncertainty(table, plan, ideal_gate_chi("X"), resample="jackknife")
