import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from povmkit import constructions as C
from povmkit.errors import InvalidRange, LengthMismatch, SpanTooSmall, ZeroOperator
from povmkit.linalg import random_psd
from povmkit.majorization import (
    NORMS,
    span_bound_check,
    descending,
    ea_gram_spectrum,
    ea_orthogonality_bound,
    sqrt_overlap_gap,
    majorization_compare,
    majorization_margin,
    ea_norm_comparison,
)
from povmkit.measures import closed_form_reference, orthogonality
from povmkit.povm import POVM, gram_sqrt

small_ints = st.lists(st.integers(-5, 5), min_size=1, max_size=6)


def weakly_majorizes_oracle(x, y):
    # x >_w y iff sum (x_i - t)_+ >= sum (y_i - t)_+ for every t; breakpoints suffice
    for t in np.concatenate([x, y]):
        if np.sum(np.maximum(x - t, 0)) < np.sum(np.maximum(y - t, 0)) - 1e-12:
            return False
    return True


class TestCompare:
    def test_examples(self):
        assert majorization_compare([1, 0], [0.5, 0.5], "strong")
        assert not majorization_compare([0.5, 0.5], [1, 0], "weak")
        assert majorization_compare([3, 0], [1, 1], "weak")
        assert not majorization_compare([3, 0], [1, 1], "strong")

    def test_bad_mode(self):
        with pytest.raises(ValueError):
            majorization_compare([1], [1], "partial")

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            majorization_margin([1, 2], [1, 2, 3])

    def test_descending(self):
        np.testing.assert_array_equal(descending([[1, 3], [2, 0]]), [3, 2, 1, 0])

    @settings(max_examples=200, deadline=None)
    @given(data=st.data())
    def test_against_convex_oracle(self, data):
        x = np.array(data.draw(small_ints), dtype=float)
        y = np.array(data.draw(st.lists(st.integers(-5, 5), min_size=x.size, max_size=x.size)), dtype=float)
        # weak majorization from above: sorted partial sums of the largest entries
        assert majorization_compare(x, y, "weak") == weakly_majorizes_oracle(x, y)
        if x.sum() == y.sum():
            assert majorization_compare(x, y, "strong") == weakly_majorizes_oracle(x, y)

    @settings(max_examples=50, deadline=None)
    @given(x=st.lists(st.floats(-10, 10), min_size=1, max_size=8), seed=st.integers(0, 2**32 - 1))
    def test_reflexive_and_permutation_invariant(self, x, seed):
        x = np.array(x)
        perm = np.random.default_rng(seed).permutation(x.size)
        assert majorization_compare(x, x[perm], "strong")
        assert majorization_compare(x[perm], x, "strong")

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), m=st.integers(1, 6))
    def test_doubly_stochastic_image_is_majorized(self, seed, m):
        rng = np.random.default_rng(seed)
        x = rng.standard_normal(m)
        # convex combination of permutation matrices
        w = rng.dirichlet(np.ones(4))
        D = sum(wi * np.eye(m)[rng.permutation(m)] for wi in w)
        assert majorization_compare(x, D @ x, "strong", tol=1e-12, sum_tol=1e-10)


class TestEaSpectrum:
    def test_values(self):
        np.testing.assert_allclose(ea_gram_spectrum(2, 4), [1, 1 / 3, 1 / 3, 1 / 3])
        np.testing.assert_allclose(ea_gram_spectrum(3, 3), np.ones(3))
        np.testing.assert_allclose(ea_gram_spectrum(2, 3), [1, 0.5, 0.5])
        np.testing.assert_allclose(ea_gram_spectrum(1, 1), [1.0])

    def test_matches_constructions(self):
        for p in (C.trine(), C.tetrahedron_sic(), C.hesse_sic()):
            lam = descending(np.linalg.eigvalsh(gram_sqrt(p)))
            np.testing.assert_allclose(lam, ea_gram_spectrum(p.dim, p.n), atol=1e-10)

    def test_sum_is_d(self):
        for d in range(1, 6):
            for n in range(d, d * d + 1):
                assert ea_gram_spectrum(d, n).sum() == pytest.approx(d)

    def test_invalid(self):
        with pytest.raises(InvalidRange):
            ea_gram_spectrum(3, 2)

    def test_random_rank_one_majorizes(self):
        for seed in range(50):
            lam = np.linalg.eigvalsh(gram_sqrt(C.random_povm(2, 3, 1, seed=seed)))
            assert majorization_compare(lam, ea_gram_spectrum(2, 3), "strong", tol=1e-12)

    def test_top_eigenvalue_at_least_one(self):
        for seed in range(50):
            p = C.random_povm(3, 6, 1 + seed % 3, seed=seed)
            assert np.linalg.eigvalsh(gram_sqrt(p))[-1] >= 1 - 1e-10


class TestSqrtOverlapGap:
    def test_rank_one_equality(self, rng):
        for d in (2, 3, 5):
            a = random_psd(d, rng, 1)
            b = random_psd(d, rng, 1)
            assert sqrt_overlap_gap(a, b) == pytest.approx(0.0, abs=1e-10)

    def test_identity(self):
        assert sqrt_overlap_gap(np.eye(2), np.eye(2)) == pytest.approx(1.0)

    def test_orthogonal_supports(self):
        assert sqrt_overlap_gap(np.diag([1.0, 2, 0]), np.diag([0, 0, 3.0])) == pytest.approx(0.0, abs=1e-15)

    def test_zero(self):
        with pytest.raises(ZeroOperator):
            sqrt_overlap_gap(np.zeros((2, 2)), np.eye(2))

    def test_sweep_d4(self, rng):
        gaps = [sqrt_overlap_gap(random_psd(4, rng, int(rng.integers(1, 5))), random_psd(4, rng, int(rng.integers(1, 5)))) for _ in range(1000)]
        assert min(gaps) >= -1e-10

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), d=st.integers(1, 5), scale=st.floats(1e-3, 1e3))
    def test_scale_invariance(self, seed, d, scale):
        rng = np.random.default_rng(seed)
        A, B = random_psd(d, rng), random_psd(d, rng)
        # the gap is homogeneous of degree 1/2 in each argument
        assert sqrt_overlap_gap(scale * A, B) == pytest.approx(np.sqrt(scale) * sqrt_overlap_gap(A, B), rel=1e-7, abs=1e-10)


class TestEaNormComparison:
    def test_trine_equality(self):
        p = C.trine()
        for norm in NORMS:
            c = ea_norm_comparison(p, 1.0, norm)
            assert c.povm_value == pytest.approx(c.ea_value, abs=1e-10)
            assert c.holds and c.witness_holds

    def test_tetrahedron_frobenius(self):
        c = ea_norm_comparison(C.tetrahedron_sic(), 1.0, "frobenius")
        assert c.ea_value == pytest.approx(np.sqrt(4 / 3), abs=1e-12)
        assert c.povm_value == pytest.approx(np.sqrt(4 / 3), abs=1e-12)

    def test_frobenius_gamma_one_is_orthogonality(self):
        p = C.random_povm(3, 5, 2, seed=0)
        c = ea_norm_comparison(p, 1.0, "frobenius")
        assert c.povm_value**2 == pytest.approx(orthogonality(p), abs=1e-10)
        assert c.ea_value**2 == pytest.approx(closed_form_reference("ea_bound", 3, 5), abs=1e-10)

    def test_random_sweep(self):
        for seed in range(200):
            p = C.random_povm(2, 3, 1 + seed % 2, seed=seed)
            S = gram_sqrt(p)
            for gamma in (0.0, 0.5, 1.0, 2.0):
                for norm in NORMS:
                    assert ea_norm_comparison(p, gamma, norm, S=S).holds

    def test_invalid(self):
        with pytest.raises(InvalidRange):
            ea_norm_comparison(C.block_projective(3, 2))
        with pytest.raises(ValueError):
            ea_norm_comparison(C.trine(), 1.0, "nuclear")

    def test_as_dict(self):
        assert ea_norm_comparison(C.trine()).as_dict()["norm"] == "frobenius"


class TestSpanBound:
    def test_mub(self):
        b = span_bound_check(C.mub_complete(2))
        assert (b.span_dim, b.n) == (4, 6)
        assert b.orthogonality == pytest.approx(10 / 3, abs=1e-12)
        assert b.bound == pytest.approx(10 / 3, abs=1e-12)
        assert abs(b.margin) < 1e-9

    def test_tetrahedron(self):
        assert abs(span_bound_check(C.tetrahedron_sic()).margin) < 1e-12

    def test_random(self):
        for seed in range(100):
            assert span_bound_check(C.random_povm(2, 6, 1, seed=seed)).margin >= -1e-9

    def test_span_too_small(self):
        with pytest.raises(SpanTooSmall):
            span_bound_check(POVM([np.eye(2) / 2, np.eye(2) / 2]))

    def test_ea_bound(self):
        assert ea_orthogonality_bound(2, 4) == pytest.approx(4 / 3)
        assert ea_orthogonality_bound(3, 1) == 0.0

    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    def test_minimum_over_span_is_two_design_value(self, d):
        # for n > d^2 the best choice of r <= d^2 is r = d^2
        for n in range(d * d + 1, d * d + 6):
            vals = [ea_orthogonality_bound(d, r) + n - r for r in range(d, d * d + 1)]
            assert min(vals) == pytest.approx(closed_form_reference("two_design_O", d, n), abs=1e-12)
