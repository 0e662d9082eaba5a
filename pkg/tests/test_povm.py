import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from povmkit import constructions as C
from povmkit.errors import (
    CompletenessViolation,
    DimMismatch,
    NotAState,
    NotHermitian,
    NotPSD,
    ZeroEffect,
    ZeroProbabilityOutcome,
)
from povmkit.linalg import random_state
from povmkit.povm import (
    POVM,
    born_probabilities,
    classify,
    gram_sqrt,
    luders_channel_apply,
    luders_update,
    new_povm,
    span_dim,
)

PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]]),
    "z": np.diag([1.0, -1.0]).astype(complex),
}

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def bloch(P):
    return np.array([np.trace(P @ PAULI[a]).real for a in "xyz"])


class TestConstruction:
    def test_identity(self):
        p = new_povm([np.eye(2)])
        assert p.n == 1 and p.dim == 2

    def test_projective(self):
        p = new_povm([np.diag([1.0, 0]), np.diag([0, 1.0])])
        assert classify(p).is_projective

    def test_completeness_violation(self):
        with pytest.raises(CompletenessViolation) as info:
            new_povm([0.6 * np.eye(2), 0.6 * np.eye(2)])
        assert info.value.residual == pytest.approx(0.2 * np.sqrt(2))

    def test_not_psd_reports_index(self):
        with pytest.raises(NotPSD) as info:
            new_povm([np.diag([1.5, 0.5]), np.diag([-0.5, 0.5])])
        assert info.value.index == 1

    def test_not_hermitian(self):
        with pytest.raises(NotHermitian):
            new_povm([np.array([[1, 0.1], [0, 0]]), np.array([[0, -0.1], [0, 1]])])

    def test_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            new_povm([np.eye(2), np.eye(3)])

    def test_zero_effect(self):
        with pytest.raises(ZeroEffect):
            new_povm([np.eye(2), np.zeros((2, 2))])
        assert new_povm([np.eye(2), np.zeros((2, 2))], allow_zero_effects=True).n == 2

    def test_empty(self):
        with pytest.raises(ValueError):
            new_povm([])

    def test_immutable(self):
        p = C.trine()
        with pytest.raises(ValueError):
            p.effects[0, 0, 0] = 1.0

    def test_effect_view(self):
        e = C.trine()[1]
        assert e.weight == pytest.approx(2 / 3)
        assert np.trace(e.normalized).real == pytest.approx(1.0)
        np.testing.assert_allclose(e.weight * e.normalized, e.operator)


class TestGram:
    def test_projective_is_identity(self):
        np.testing.assert_allclose(gram_sqrt(C.computational_basis(3)), np.eye(3), atol=1e-14)

    def test_identity_effect(self):
        np.testing.assert_allclose(gram_sqrt(POVM([np.eye(2)])), [[2.0]])

    def test_tetrahedron(self):
        S = gram_sqrt(C.tetrahedron_sic())
        expected = np.full((4, 4), 1 / 6) + np.eye(4) * (1 / 2 - 1 / 6)
        np.testing.assert_allclose(S, expected, atol=1e-12)

    def test_symmetric_psd_over_random_corpus(self):
        for i in range(200):
            d = 2 + i % 3
            n = 1 + i % (d * d + 2)
            k = d if n < d else 1 + i % d
            S = gram_sqrt(C.random_povm(d, n, k, seed=i))
            assert np.max(np.abs(S - S.T)) < 1e-12
            assert np.linalg.eigvalsh(S).min() > -1e-10

    @settings(max_examples=30, deadline=None)
    @given(seed=seeds, d=st.integers(2, 4), n=st.integers(2, 10))
    def test_rank_one_entries(self, seed, d, n):
        # for rank-1 effects S_ij = sqrt(e_i e_j) tr(Pi_i Pi_j)
        if n < d:
            n = d
        p = C.random_povm(d, n, 1, seed=seed)
        e = p.weights
        Pi = p.normalized
        overlaps = np.array([[np.trace(A @ B).real for B in Pi] for A in Pi])
        np.testing.assert_allclose(gram_sqrt(p), np.sqrt(np.outer(e, e)) * overlaps, atol=1e-9)


class TestClassify:
    def test_projective_d3(self):
        c = classify(C.computational_basis(3))
        assert c.is_projective and c.is_rank_one and c.is_unbiased
        assert not c.is_ic and c.span_dim == 3

    def test_tetrahedron(self):
        c = classify(C.tetrahedron_sic())
        assert c.is_rank_one and c.is_unbiased and c.is_equiangular and c.is_ic
        assert c.span_dim == 4 and not c.is_projective

    def test_trivial(self):
        c = classify(POVM([np.eye(2) / 2, np.eye(2) / 2]))
        assert c.is_unbiased and not c.is_rank_one and c.span_dim == 1
        assert span_dim(POVM([np.eye(2) / 2, np.eye(2) / 2])) == 1

    def test_as_dict(self):
        assert set(classify(C.trine()).as_dict()) == {
            "is_rank_one",
            "is_unbiased",
            "is_projective",
            "is_equiangular",
            "is_ic",
            "span_dim",
        }


class TestBorn:
    def test_z_on_zero(self):
        np.testing.assert_allclose(born_probabilities(C.computational_basis(2), np.diag([1.0, 0])), [1, 0])

    def test_maximally_mixed(self):
        p = C.random_povm(3, 5, 2, seed=4)
        np.testing.assert_allclose(born_probabilities(p, np.eye(3) / 3), p.weights / 3, atol=1e-14)

    def test_tetrahedron_bloch(self):
        p = C.tetrahedron_sic()
        probs = born_probabilities(p, np.diag([1.0, 0]))
        z = np.array([bloch(P)[2] for P in p.normalized])
        np.testing.assert_allclose(probs, (1 + z) / 4, atol=1e-14)
        assert probs.sum() == pytest.approx(1.0, abs=1e-14)
        # the four Bloch vectors form a regular tetrahedron
        B = np.array([bloch(P) for P in p.normalized])
        G = B @ B.T
        np.testing.assert_allclose(G[~np.eye(4, dtype=bool)], -1 / 3, atol=1e-12)

    def test_not_a_state(self):
        with pytest.raises(NotAState):
            born_probabilities(C.trine(), np.diag([1.0, 1.0]))
        with pytest.raises(NotAState):
            born_probabilities(C.trine(), np.diag([1.5, -0.5]))
        with pytest.raises(DimMismatch):
            born_probabilities(C.trine(), np.eye(3) / 3)


class TestLuders:
    def test_projective_collapses(self, rng):
        p = C.computational_basis(3)
        rho = random_state(3, rng)
        for i in range(3):
            np.testing.assert_allclose(luders_update(p, rho, i), np.diag(np.eye(3)[i]), atol=1e-12)

    def test_identity_povm(self, rng):
        rho = random_state(2, rng)
        p = POVM([np.eye(2)])
        np.testing.assert_allclose(luders_update(p, rho, 0), rho, atol=1e-14)
        np.testing.assert_allclose(luders_channel_apply(p, rho), rho, atol=1e-14)

    def test_rank_one_post_state(self, rng):
        p = C.random_povm(3, 6, 1, seed=11)
        rho = random_state(3, rng)
        for i in range(p.n):
            np.testing.assert_allclose(luders_update(p, rho, i), p.normalized[i], atol=1e-10)

    def test_zero_probability(self):
        with pytest.raises(ZeroProbabilityOutcome):
            luders_update(C.computational_basis(2), np.diag([1.0, 0]), 1)

    def test_coherences_erased(self):
        plus = np.full((2, 2), 0.5)
        np.testing.assert_allclose(luders_channel_apply(C.computational_basis(2), plus), np.eye(2) / 2, atol=1e-15)

    def test_channel_is_mixture_of_updates(self, rng):
        for p in (C.tetrahedron_sic(), C.hesse_sic(), C.random_povm(3, 4, 2, seed=2)):
            rho = random_state(p.dim, rng)
            probs = born_probabilities(p, rho)
            mix = sum(q * luders_update(p, rho, i) for i, q in enumerate(probs))
            np.testing.assert_allclose(luders_channel_apply(p, rho), mix, atol=1e-12)

    def test_sic_maximally_mixed_is_fixed(self):
        p = C.hesse_sic()
        np.testing.assert_allclose(luders_channel_apply(p, np.eye(3) / 3), np.eye(3) / 3, atol=1e-14)
