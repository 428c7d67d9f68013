"""
Tests for entropic quantities and distance measures.
"""
import numpy as np
import pytest

from qmac_capacity.errors import LayoutError, ValidationError
from qmac_capacity.quantum.channels import (
    QuantumInstrument,
    apply,
    collective_phase_flip,
    dephasing,
    identity_channel,
    measure_instrument,
)
from qmac_capacity.quantum.information import (
    binary_entropy,
    channel_coherent_information,
    coherent_information,
    conditional_coherent_information,
    conditional_coherent_information_assembled,
    conditional_entropy,
    dephasing_family_scan,
    dephasing_family_state,
    entropy,
    fidelity,
    fidelity_literal,
    instrument_coherent_information,
    mutual_information,
    shannon_entropy,
    trace_distance,
)
from qmac_capacity.quantum.linalg import SubsystemLayout
from qmac_capacity.quantum.states import (
    CqqState,
    assemble_cqq,
    basis_state,
    density_from_matrix,
    maximally_entangled,
    maximally_mixed,
    random_cqq,
    random_density,
    random_pure,
)


def _erasure_blocks(channel, d):
    """Channel outputs on (B, C) for Alice's |0> and |1> with Bob's half of Phi_d."""
    phi = maximally_entangled(d, ("B", "B'")).density()
    return tuple(apply(channel, basis_state(u, 2, "A'").density().tensor(phi)) for u in range(2))


class TestEntropy:
    """Test von Neumann and Shannon entropies."""

    def test_maximally_mixed_qubit(self):
        """Test that H(pi_2) = 1."""
        assert entropy(maximally_mixed(2)) == pytest.approx(1.0)

    def test_pure_state_has_zero_entropy(self, rng):
        """Test that any pure state has zero entropy."""
        assert entropy(random_pure(5, seed=rng).density()) == pytest.approx(0.0, abs=1e-9)

    def test_diagonal_state(self):
        """Test that H(diag(3/4, 1/4)) equals the binary entropy of 1/4."""
        rho = density_from_matrix(np.diag([0.75, 0.25]).astype(complex))
        assert entropy(rho) == pytest.approx(binary_entropy(0.25), abs=1e-12)
        assert entropy(rho) == pytest.approx(0.8112781244591328, abs=1e-12)

    def test_binary_entropy_endpoints(self):
        """Test that H(0) = 0 and H(1/2) = 1."""
        assert binary_entropy(0.0) == 0.0
        assert binary_entropy(0.5) == pytest.approx(1.0)

    def test_binary_entropy_symmetry(self, rng):
        """Test that H(p) = H(1 - p)."""
        for p in rng.uniform(0, 1, 100):
            assert binary_entropy(p) == pytest.approx(binary_entropy(1 - p), abs=1e-12)

    def test_binary_entropy_range(self):
        """Test that arguments outside [0, 1] are rejected."""
        with pytest.raises(ValidationError):
            binary_entropy(1.5)

    def test_shannon_ignores_zeros(self):
        """Test that zero probabilities contribute nothing."""
        assert shannon_entropy([0.5, 0.0, 0.5]) == pytest.approx(1.0)


class TestMutualInformation:
    """Test mutual and conditional information."""

    def test_product_state(self, rng):
        """Test that a product state has zero mutual information."""
        a = random_density(2, seed=rng, layout=SubsystemLayout.single(2, "A"))
        b = random_density(2, seed=rng, layout=SubsystemLayout.single(2, "B"))
        assert mutual_information(a.tensor(b)) == pytest.approx(0.0, abs=1e-9)

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_maximally_entangled(self, d):
        """Test that I(A;B) = 2 log2 d on Phi_d."""
        assert mutual_information(maximally_entangled(d).density()) == pytest.approx(2 * np.log2(d))

    @pytest.mark.parametrize("q", [0.0, 0.1, 0.3, 0.5])
    def test_erasure_classical_part(self, erasure2, q):
        """Test that I(U;C) = H(q) for the erasure pattern."""
        blocks = tuple(b.reduced(["C"]) for b in _erasure_blocks(erasure2, 2))
        rho = assemble_cqq([q, 1 - q], blocks, "U")
        assert mutual_information(rho, "U", "C") == pytest.approx(binary_entropy(q), abs=1e-9)

    def test_conditional_entropy_of_bell_state(self):
        """Test that H(A|B) = -1 on a Bell state."""
        assert conditional_entropy(maximally_entangled(2).density()) == pytest.approx(-1.0)

    def test_overlapping_groups(self):
        """Test that overlapping subsystem groups raise LayoutError."""
        rho = maximally_entangled(2).density()
        with pytest.raises(LayoutError):
            mutual_information(rho, ["A"], ["A"])


class TestCoherentInformation:
    """Test coherent information of states and channels."""

    @pytest.mark.parametrize("d", [2, 3])
    def test_maximally_entangled(self, d):
        """Test that I_c(A>B) = log2 d on Phi_d."""
        assert coherent_information(maximally_entangled(d).density()) == pytest.approx(np.log2(d))

    def test_mixed_source(self, rng):
        """Test that I_c(A>B) = -1 for pi_2 (x) sigma."""
        sigma = random_density(3, seed=rng, layout=SubsystemLayout.single(3, "B"))
        assert coherent_information(maximally_mixed(2, "A").tensor(sigma)) == pytest.approx(-1.0)

    @pytest.mark.parametrize("p", [0.0, 0.1, 0.25, 0.5])
    def test_phase_flip_bell_pairs(self, p):
        """Test that I_c(AB>C) = 2 - H(p) on the phase-flip output of two Bell pairs."""
        joint = maximally_entangled(2, ("A", "A'")).tensor(maximally_entangled(2, ("B", "B'"))).density()
        out = apply(collective_phase_flip(p), joint)
        assert coherent_information(out, ["A", "B"], ["C"]) == pytest.approx(2 - binary_entropy(p), abs=1e-9)

    @pytest.mark.parametrize("d", [2, 3])
    def test_identity_channel(self, d):
        """Test that the identity channel on pi_d gives log2 d."""
        assert channel_coherent_information(maximally_mixed(d, "A'"), identity_channel(d)) == pytest.approx(np.log2(d))

    @pytest.mark.parametrize("p", [0.0, 0.1, 0.4])
    def test_phase_flip_channel(self, p):
        """Test that the phase flip on pi_4 gives 2 - H(p)."""
        value = channel_coherent_information(maximally_mixed(4), collective_phase_flip(p))
        assert value == pytest.approx(2 - binary_entropy(p), abs=1e-9)

    def test_full_dephasing(self):
        """Test that full dephasing on pi_2 gives zero."""
        assert channel_coherent_information(maximally_mixed(2, "A'"), dephasing(0.5)) == pytest.approx(0.0, abs=1e-9)

    def test_input_mismatch(self):
        """Test that a state off the channel input raises LayoutError."""
        with pytest.raises(LayoutError):
            channel_coherent_information(maximally_mixed(3, "Q"), identity_channel(2))


class TestConditionalCoherentInformation:
    """Test the expected coherent information of cqq states."""

    def test_single_block(self, rng):
        """Test that one block reduces to plain coherent information."""
        layout = SubsystemLayout((2, 2), ("A", "B"))
        block = random_density(4, seed=rng, layout=layout)
        cqq = CqqState(np.array([1.0]), (block,))
        assert conditional_coherent_information(cqq) == pytest.approx(coherent_information(block))

    @pytest.mark.parametrize("q", [0.0, 0.2, 0.5])
    def test_erasure_pattern(self, erasure2, q):
        """Test that I_c(B>CU) = (1 - 2q) log2 d."""
        cqq = CqqState(np.array([q, 1 - q]), _erasure_blocks(erasure2, 2), "U")
        assert conditional_coherent_information(cqq, ["B"], ["C"]) == pytest.approx(1 - 2 * q, abs=1e-9)

    def test_expectation_matches_assembled(self, rng):
        """Test that the block form and the assembled form agree."""
        layout = SubsystemLayout((2, 2), ("A", "B"))
        cqq = random_cqq(3, layout, seed=rng)
        rho = assemble_cqq(cqq.probs, cqq.blocks)
        expected = conditional_coherent_information(cqq, ["A"], ["B"])
        assert conditional_coherent_information_assembled(rho, "X", ["A"], ["B"]) == pytest.approx(expected, abs=1e-9)


class TestInstrumentCoherentInformation:
    """Test coherent information of quantum instruments."""

    def test_single_component(self, rng):
        """Test that a one-component instrument matches the channel value."""
        ch = dephasing(0.2)
        rho = random_density(2, seed=rng, layout=SubsystemLayout.single(2, "A'"))
        value = instrument_coherent_information(rho, QuantumInstrument((ch,)))
        assert value == pytest.approx(channel_coherent_information(rho, ch), abs=1e-9)

    def test_measure_and_keep(self):
        """Test that measuring pi_2 and keeping the outcome gives zero."""
        value = instrument_coherent_information(maximally_mixed(2, "A'"), measure_instrument(2))
        assert value == pytest.approx(0.0, abs=1e-9)


class TestDistances:
    """Test fidelity and trace distance."""

    def test_self_fidelity(self, rng):
        """Test that F(rho, rho) = 1."""
        rho = random_density(3, seed=rng)
        assert fidelity(rho, rho) == pytest.approx(1.0, abs=1e-9)

    def test_orthogonal_fidelity(self):
        """Test that orthogonal pure states have zero fidelity."""
        assert fidelity(basis_state(0, 2).density(), basis_state(1, 2).density()) == pytest.approx(0.0, abs=1e-12)

    def test_pure_against_mixed(self):
        """Test that F(|0><0|, pi_2) = 1/2."""
        assert fidelity(basis_state(0, 2).density(), maximally_mixed(2)) == pytest.approx(0.5)

    def test_literal_form_agrees(self, rng):
        """Test that the SVD form matches the textbook form."""
        for _ in range(10):
            rho, sigma = random_density(3, seed=rng), random_density(3, rank=2, seed=rng)
            assert fidelity(rho, sigma) == pytest.approx(fidelity_literal(rho, sigma), abs=1e-8)

    def test_fidelity_is_symmetric(self, rng):
        """Test that F(rho, sigma) = F(sigma, rho)."""
        rho, sigma = random_density(4, seed=rng), random_density(4, seed=rng)
        assert fidelity(rho, sigma) == pytest.approx(fidelity(sigma, rho), abs=1e-9)

    def test_trace_distance_identical(self, rng):
        """Test that identical states are at distance 0."""
        rho = random_density(3, seed=rng)
        assert trace_distance(rho, rho) == pytest.approx(0.0, abs=1e-12)

    def test_trace_distance_orthogonal(self):
        """Test that orthogonal pure states are at distance 2."""
        assert trace_distance(basis_state(0, 3).density(), basis_state(2, 3).density()) == pytest.approx(2.0)

    def test_trace_distance_diagonal(self):
        """Test that diag(1, 0) and pi_2 are at distance 1."""
        assert trace_distance(basis_state(0, 2).density(), maximally_mixed(2)) == pytest.approx(1.0)

    def test_shape_mismatch(self):
        """Test that states of different dimension raise LayoutError."""
        with pytest.raises(LayoutError):
            trace_distance(maximally_mixed(2), maximally_mixed(3))


class TestDephasingFamily:
    """Test the two-qubit dephasing-family input scan."""

    def test_half_is_maximally_mixed(self):
        """Test that alpha = 1/2 gives pi_4."""
        np.testing.assert_allclose(dephasing_family_state(0.5).matrix, np.eye(4) / 4)

    def test_alpha_range(self):
        """Test that alpha outside [0, 1] is rejected."""
        with pytest.raises(ValidationError):
            dephasing_family_state(-0.1)

    def test_scan_peaks_at_half(self, phase_flip01):
        """Test that the scan is maximized at alpha = 1/2 with value 2 - H(p)."""
        scan = dict(dephasing_family_scan(phase_flip01, np.linspace(0, 1, 11)))
        best = max(scan, key=scan.get)
        assert best == pytest.approx(0.5)
        assert scan[best] == pytest.approx(2 - binary_entropy(0.1), abs=1e-9)

    def test_scan_endpoint(self, phase_flip01):
        """Test that alpha = 1 gives one bit."""
        ((_, value),) = dephasing_family_scan(phase_flip01, [1.0])
        assert value == pytest.approx(1.0, abs=1e-9)
