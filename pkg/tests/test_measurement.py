import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qinstrument import gallery
from qinstrument import randops as R
from qinstrument.errors import (
    DimensionMismatch,
    IndexOutOfRange,
    InvalidDecomposition,
    ZeroProbabilityOutcome,
)
from qinstrument.matcore import norm
from qinstrument.measurement import (
    apply_nonselective,
    apply_selective,
    apply_selective_pure,
    has_sharp_value,
    probabilities,
    pure_probabilities,
    sample_counts,
    sample_outcome,
    sharp_value_decomposition_check,
    spectral_components,
)
from qinstrument.quantum_types import (
    DensityOperator,
    Instrument,
    StateVector,
    luders_instrument,
)

from conftest import ket

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def sharp_state(rng, obs, i, rank=None):
    """Random density supported inside eigenspace i."""
    basis = obs.eigenbases()[i]
    r = basis.shape[1] if rank is None else rank
    g = R.ginibre(rng, basis.shape[1], r)
    rho = basis @ g @ g.conj().T @ basis.conj().T
    return DensityOperator(rho / np.trace(rho).real)


class TestProbabilities:
    def test_plus(self, luders_z, plus):
        np.testing.assert_allclose(probabilities(luders_z, plus).probabilities, [0.5, 0.5])

    def test_eigenstate_order(self, luders_z):
        # labels are (-1, +1); |0> has eigenvalue +1
        np.testing.assert_allclose(probabilities(luders_z, ket(1, 0)).probabilities, [0, 1])

    def test_scalar_effects(self, rng):
        inst = gallery.preset("half-half")
        np.testing.assert_allclose(probabilities(inst, R.density(rng, 2)).probabilities, [0.5, 0.5])

    def test_dimension_mismatch(self, luders_z):
        with pytest.raises(DimensionMismatch):
            probabilities(luders_z, DensityOperator.maximally_mixed(3))

    @settings(max_examples=100, deadline=None)
    @given(seeds, st.integers(1, 6), st.integers(1, 5))
    def test_normalization_and_pure_path(self, seed, d, k):
        rng = np.random.default_rng(seed)
        inst = R.instrument(rng, d, k)
        psi = R.state_vector(rng, d)
        raw = np.einsum("ij,kji->k", psi.projector(), inst.effects()).real
        assert abs(raw.sum() - 1) <= 1e-9
        p_rho = probabilities(inst, psi.density()).probabilities
        p_vec = pure_probabilities(inst, psi).probabilities
        assert np.max(np.abs(p_rho - p_vec)) <= 1e-9


class TestSelective:
    def test_plus_projects(self, luders_z, plus):
        out = apply_selective(luders_z, "+1", plus)
        assert out.probability == pytest.approx(0.5)
        np.testing.assert_allclose(out.post_state.matrix, np.diag([1, 0]), atol=1e-12)

    def test_zero_probability(self, luders_z):
        with pytest.raises(ZeroProbabilityOutcome):
            apply_selective(luders_z, "+1", ket(0, 1))

    def test_unknown_label(self, luders_z, plus):
        with pytest.raises(IndexOutOfRange):
            apply_selective(luders_z, "7", plus)

    def test_two_spin_repeatable_flip(self):
        inst = gallery.appendix_c_instrument("repeatable")
        up_up = StateVector.basis(4, 0)
        out = apply_selective(inst, "+1", up_up)
        assert out.probability == pytest.approx(1.0)
        np.testing.assert_allclose(out.post_state.matrix, StateVector.basis(4, 1).projector(), atol=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(seeds, st.integers(1, 5), st.integers(1, 4))
    def test_vector_and_density_paths_agree(self, seed, d, k):
        rng = np.random.default_rng(seed)
        inst = R.instrument(rng, d, k)
        psi = R.state_vector(rng, d)
        for i in range(k):
            p, phi = apply_selective_pure(inst, i, psi)
            out = apply_selective(inst, i, psi.density())
            assert abs(p - out.probability) <= 1e-9
            assert norm(phi.projector() - out.post_state.matrix) <= 1e-9


class TestNonselective:
    def test_decoheres_plus(self, luders_z, plus):
        np.testing.assert_allclose(apply_nonselective(luders_z, plus).matrix, np.eye(2) / 2, atol=1e-12)

    def test_fixed_point(self, luders_z):
        rho = DensityOperator.maximally_mixed(2)
        np.testing.assert_allclose(apply_nonselective(luders_z, rho).matrix, rho.matrix, atol=1e-12)

    def test_unitary(self, rng):
        u = R.haar_unitary(rng, 3)
        rho = R.density(rng, 3)
        out = apply_nonselective(Instrument([u]), rho)
        np.testing.assert_allclose(out.matrix, u @ rho.matrix @ u.conj().T, atol=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(seeds, st.integers(1, 5), st.integers(1, 4))
    def test_mixture_identity(self, seed, d, k):
        rng = np.random.default_rng(seed)
        inst = R.instrument(rng, d, k)
        rho = R.density(rng, d)
        dist = probabilities(inst, rho)
        mix = sum(
            p * apply_selective(inst, i, rho).post_state.matrix
            for i, p in enumerate(dist.probabilities)
            if p > 1e-12
        )
        assert norm(apply_nonselective(inst, rho).matrix - mix) <= 1e-9

    @settings(max_examples=50, deadline=None)
    @given(seeds, st.integers(1, 6))
    def test_luders_idempotent(self, seed, d):
        rng = np.random.default_rng(seed)
        inst = luders_instrument(R.observable(rng, d))
        once = apply_nonselective(inst, R.density(rng, d))
        assert norm(apply_nonselective(inst, once).matrix - once.matrix) <= 1e-9


class TestSampling:
    def test_deterministic_distribution(self, luders_z):
        for seed in range(5):
            out = sample_outcome(luders_z, ket(1, 0), seed)
            assert out.label == "+1"
            np.testing.assert_allclose(out.post_state.matrix, np.diag([1, 0]), atol=1e-12)

    def test_seed_reproducible(self, rng):
        inst, rho = R.instrument(rng, 3, 4), R.density(rng, 3)
        assert sample_outcome(inst, rho, 99).label == sample_outcome(inst, rho, 99).label
        np.testing.assert_array_equal(sample_counts(inst, rho, 500, 5), sample_counts(inst, rho, 500, 5))

    def test_zero_probability_middle_outcome_never_drawn(self, plus):
        inst = Instrument([np.diag([1, 0]), np.zeros((2, 2)), np.diag([0, 1])])
        counts = sample_counts(inst, plus, 2000, 3)
        assert counts[1] == 0
        assert counts.sum() == 2000

    def test_frequency(self, luders_z, plus):
        counts = sample_counts(luders_z, plus, 100_000, 12345)
        assert abs(counts[1] / 100_000 - 0.5) < 0.01


class TestSharpValues:
    def test_examples(self, sigma_z):
        plus_idx = sigma_z.index("+1")
        assert has_sharp_value(ket(1, 0), sigma_z, plus_idx)
        mixed = DensityOperator.maximally_mixed(2)
        assert not has_sharp_value(mixed, sigma_z, 0)
        assert not has_sharp_value(mixed, sigma_z, 1)
        with pytest.raises(IndexOutOfRange):
            has_sharp_value(mixed, sigma_z, 2)

    def test_two_spin_mixture(self):
        obs = gallery.appendix_c_observable()
        rho = DensityOperator(0.3 * StateVector.basis(4, 0).projector() + 0.7 * StateVector.basis(4, 1).projector())
        assert has_sharp_value(rho, obs, "+1")
        assert not has_sharp_value(rho, obs, "-1")

    def test_decomposition_check(self, sigma_z):
        rho = ket(1, 0).density()
        w, ks = spectral_components(rho)
        assert sharp_value_decomposition_check(rho, sigma_z, "+1", w, ks)
        mixed = DensityOperator.maximally_mixed(2)
        assert sharp_value_decomposition_check(mixed, sigma_z, 0, [0.5, 0.5], [ket(1, 0), ket(0, 1)])
        with pytest.raises(InvalidDecomposition):
            sharp_value_decomposition_check(mixed, sigma_z, 0, [0.9, 0.1], [ket(1, 0), ket(0, 1)])

    @settings(max_examples=100, deadline=None)
    @given(seeds, st.integers(2, 6), st.data())
    def test_random_sharp_states(self, seed, d, data):
        rng = np.random.default_rng(seed)
        obs = R.observable(rng, d)
        i = data.draw(st.integers(0, len(obs.eigenvalues) - 1))
        rho = sharp_state(rng, obs, i)
        assert has_sharp_value(rho, obs, i)
        w, ks = spectral_components(rho)
        assert sharp_value_decomposition_check(rho, obs, i, w, ks)
        # ideal measurement leaves sharp states alone
        after = apply_nonselective(luders_instrument(obs), rho)
        assert norm(after.matrix - rho.matrix) <= 1e-9
