import numpy as np
import pytest
import scipy.linalg

from povmkit import constructions as C
from povmkit import measures as M
from povmkit.errors import InvalidRange, SingularTotal
from povmkit.optimizer import (
    OptimizationConfig,
    PovmParameterization,
    bound_for,
    conjecture_report,
    equiangularity_deviation,
    finite_difference_check,
    minimize,
    objective_value,
    to_povm,
)
from povmkit.povm import classify

FAST = OptimizationConfig(restarts=4)


class TestParameterization:
    def test_single_factor_gives_identity(self, rng):
        for d, k in ((2, 2), (3, 3), (3, 2)):
            if k < d:
                continue
            p = to_povm(PovmParameterization.random(d, 1, k, seed=3))
            np.testing.assert_allclose(p.effects[0], np.eye(d), atol=1e-12)

    def test_orthonormal_columns_give_projective(self):
        # split a unitary's columns across factors: T = I and E_i = projectors
        U = np.linalg.qr(np.random.default_rng(0).standard_normal((3, 3)) + 0j)[0]
        G = np.zeros((2, 3, 2), dtype=complex)
        G[0, :, 0] = U[:, 0]
        G[1, :, :] = U[:, 1:]
        p = to_povm(PovmParameterization.from_factors(G))
        assert classify(p).is_projective
        np.testing.assert_allclose(p.effects[0], np.outer(U[:, 0], U[:, 0].conj()), atol=1e-12)

    def test_factor_roundtrip(self, rng):
        G = rng.standard_normal((4, 3, 2)) + 1j * rng.standard_normal((4, 3, 2))
        np.testing.assert_array_equal(PovmParameterization.from_factors(G).factors, G)

    def test_matches_random_povm(self):
        # same seed, same layout
        p = to_povm(PovmParameterization.random(3, 5, 2, seed=9))
        np.testing.assert_allclose(p.effects, C.random_povm(3, 5, 2, seed=9).effects, atol=1e-14)

    def test_bad_length(self):
        with pytest.raises(ValueError):
            PovmParameterization(2, 2, 1, np.zeros(7))

    def test_objective_matches_measures(self):
        params = PovmParameterization.random(3, 5, 2, seed=1)
        p = to_povm(params)
        assert objective_value(params, "orthogonality") == pytest.approx(M.orthogonality(p), abs=1e-10)
        assert objective_value(params, "disturbance") == pytest.approx(M.disturbance(p), abs=1e-10)

    def test_rank_one_fast_path(self):
        params = PovmParameterization.random(4, 7, 1, seed=2)
        assert objective_value(params) == pytest.approx(M.orthogonality(to_povm(params)), abs=1e-10)

    def test_singular(self):
        with pytest.raises(SingularTotal):
            objective_value(PovmParameterization(2, 2, 1, np.zeros(8)))
        with pytest.raises(SingularTotal):
            to_povm(PovmParameterization(2, 2, 1, np.zeros(8)))


class TestFiniteDifference:
    def test_projective_point(self):
        params = PovmParameterization.from_factors(np.eye(2, dtype=complex).reshape(2, 2, 1))
        for obj in ("orthogonality", "disturbance"):
            assert finite_difference_check(params, obj) < 1e-4

    def test_random_point(self):
        params = PovmParameterization.random(2, 3, 1, seed=4)
        for obj in ("orthogonality", "disturbance"):
            assert finite_difference_check(params, obj) < 1e-4

    def test_near_singular(self):
        x = np.zeros(8)
        x[0] = 1e-9
        with pytest.raises(SingularTotal):
            finite_difference_check(PovmParameterization(2, 2, 1, x))


class TestBounds:
    def test_values(self):
        assert bound_for("orthogonality", 2, 3, 1) == (pytest.approx(0.5), "ea")
        assert bound_for("orthogonality", 3, 2, 3) == (pytest.approx(1.0), "block_construction")
        assert bound_for("orthogonality", 2, 6, 1) == (pytest.approx(10 / 3), "two_design")
        assert bound_for("disturbance", 2, 4, 1) == (pytest.approx(4 / 3), "ea")
        assert bound_for("disturbance", 2, 6, 1) == (pytest.approx(4 / 3), "two_design")
        assert bound_for("disturbance", 2, 4, 2) == (0.0, "nonnegativity")


class TestMinimize:
    def test_trine(self):
        r = minimize(2, 3, 1)
        assert abs(r.best_value - 0.5) < 1e-6
        assert r.equiangularity_deviation < 1e-4
        assert r.bound_kind == "ea" and abs(r.gap) < 1e-6
        assert len(r.restarts) == 16

    def test_sic_d2(self):
        r = minimize(2, 4, 1)
        assert abs(r.best_value - 4 / 3) < 1e-6
        assert classify(r.best_povm, tol=1e-4).is_equiangular

    def test_disturbance_d2(self):
        r = minimize(2, 4, 1, OptimizationConfig(objective="disturbance"))
        assert abs(r.best_value - 4 / 3) < 1e-5

    def test_deterministic(self):
        a = minimize(2, 3, 1, FAST)
        b = minimize(2, 3, 1, FAST)
        assert a.best_value == b.best_value
        assert np.array_equal(a.best_params.x, b.best_params.x)
        assert a.best_restart == b.best_restart

    def test_trace_monotone(self):
        r = minimize(3, 4, 2, OptimizationConfig(restarts=2, max_iterations=3000))
        for rec in r.restarts:
            assert rec.trace.size == rec.iterations
            assert np.all(np.diff(rec.trace) <= 0)
            assert rec.value <= rec.trace[0]

    def test_iteration_cap(self):
        r = minimize(3, 9, 1, OptimizationConfig(restarts=1, max_iterations=50))
        assert r.iterations_used == 50 and not r.converged

    def test_best_is_minimum_over_restarts(self):
        r = minimize(2, 5, 1, FAST)
        assert r.best_value == min(rec.value for rec in r.restarts)
        assert r.restarts[r.best_restart].value == r.best_value
        assert r.best_value == pytest.approx(M.orthogonality(r.best_povm), abs=1e-10)

    def test_invalid(self):
        with pytest.raises(InvalidRange):
            minimize(3, 2, 1)
        with pytest.raises(ValueError):
            OptimizationConfig(restarts=0)
        with pytest.raises(ValueError):
            OptimizationConfig(objective="strength")
        with pytest.raises(ValueError):
            OptimizationConfig(objective_tol=0)

    def test_as_dict(self):
        out = minimize(2, 3, 1, OptimizationConfig(restarts=2)).as_dict()
        assert len(out["restarts"]) == 2
        assert {"best_value", "bound_value", "gap", "iterations_used"} <= set(out)

    def test_equiangularity_deviation(self):
        assert equiangularity_deviation(C.trine()) < 1e-12
        assert equiangularity_deviation(C.random_povm(2, 3, 1, seed=0)) > 1e-3
        assert equiangularity_deviation(C.block_projective(3, 2)) == 0.0


class TestConjectures:
    def test_ea_equality_cases(self):
        rep = conjecture_report("ea_equality_cases", 2, 3, FAST)
        assert rep["target"] == "ea_equality_cases"
        near = [r for r in rep["runs"] if r["near_bound"]]
        assert near and all(r["equiangularity_deviation"] < 1e-3 for r in near)
        assert rep["evidence"] == "supported"

    def test_fewer_effects(self):
        rep = conjecture_report("fewer_effects", 3, 2, FAST)
        assert rep["reference_value"] == 1.0 and rep["k"] == 3
        assert rep["best_value"] >= 1 - 1e-6

    def test_fewer_effects_counterexample_below_block_value(self):
        # d=4, n=3: block value is 1, yet rank-2 effects reach O ~ 0.9021
        cfg = OptimizationConfig(restarts=1, seed=0)
        res = minimize(4, 3, 2, cfg)
        E = res.best_povm.effects
        np.testing.assert_allclose(sum(E), np.eye(4), atol=1e-12)
        assert min(np.linalg.eigvalsh(e).min() for e in E) > -1e-10
        roots = [scipy.linalg.sqrtm(e) for e in E]
        S = np.array([[np.trace(a @ b).real for b in roots] for a in roots])
        O = np.sum((S - np.eye(3)) ** 2)
        assert O == pytest.approx(res.best_value, abs=1e-6)
        assert O < 0.91
        rep = conjecture_report("fewer_effects", 4, 3, cfg, k=2)
        assert rep["evidence"] == "contradicted"

    def test_more_effects(self):
        rep = conjecture_report("more_effects", 2, 6, FAST)
        assert rep["reference_value"] == pytest.approx(10 / 3)
        assert rep["best_value"] >= 10 / 3 - 1e-5
        assert "proof" in rep["note"]

    def test_ranges(self):
        with pytest.raises(InvalidRange):
            conjecture_report("ea_equality_cases", 2, 5)
        with pytest.raises(InvalidRange):
            conjecture_report("fewer_effects", 2, 3)
        with pytest.raises(InvalidRange):
            conjecture_report("more_effects", 2, 4)
        with pytest.raises(ValueError):
            conjecture_report("c9", 2, 4)
