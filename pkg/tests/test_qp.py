"""QP solver: hand-derived KKT cases, oracle agreement, warm starts, determinism."""

import numpy as np
import pytest
from _oracles import dual_projected_gradient, random_feasible_problem

from tankbarrier.qp import QPProblem, solve, warm_start


def simple_problem():
    # min (z-1)^2 s.t. z >= 2  ->  z* = 2, multiplier 2 (stationarity 2z-2 = lam)
    return QPProblem(
        Q=np.array([[2.0]]), c=np.array([-2.0]), G=np.array([[1.0]]), b=np.array([2.0])
    )


class TestBasics:
    def test_unconstrained_minimum(self):
        p = QPProblem(Q=2.0 * np.eye(3), c=np.zeros(3), G=None, b=None)
        s = solve(p)
        assert s.status == "optimal"
        np.testing.assert_array_equal(s.z, np.zeros(3))
        assert s.iterations == 0

    def test_one_dimensional_kkt_by_hand(self):
        s = solve(simple_problem())
        assert s.status == "optimal"
        assert s.z[0] == pytest.approx(2.0, abs=1e-12)
        assert s.duals[0] == pytest.approx(2.0, abs=1e-12)

    def test_inactive_constraint_ignored(self):
        p = QPProblem(
            Q=np.array([[2.0]]),
            c=np.array([-2.0]),
            G=np.array([[1.0]]),
            b=np.array([-5.0]),  # z >= -5, slack at the optimum z = 1
        )
        s = solve(p)
        assert s.z[0] == pytest.approx(1.0)
        assert s.duals[0] == 0.0
        assert s.active_set == []

    def test_kkt_residuals_reported(self):
        s = solve(simple_problem())
        for key in ("stationarity", "primal", "dual", "complementarity"):
            assert s.kkt[key] <= 1e-8

    def test_rejects_indefinite_q(self):
        with pytest.raises(ValueError):
            solve(QPProblem(Q=-np.eye(2), c=np.zeros(2), G=None, b=None))

    def test_rejects_asymmetric_q(self):
        with pytest.raises(ValueError):
            QPProblem(
                Q=np.array([[1.0, 0.5], [0.0, 1.0]]), c=np.zeros(2), G=None, b=None
            )

    def test_infeasible_detected_with_conflicting_hard_rows(self):
        # z >= 1 and -z >= 1 cannot both hold
        p = QPProblem(
            Q=np.eye(1),
            c=np.zeros(1),
            G=np.array([[1.0], [-1.0]]),
            b=np.array([1.0, 1.0]),
        )
        s = solve(p)
        assert s.status == "infeasible"


class TestOracleAgreement:
    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_matches_projected_gradient(self, seed):
        rng = np.random.default_rng(seed)
        for _ in range(100):
            Q, c, G, b = random_feasible_problem(rng)
            p = QPProblem(Q=Q, c=c, G=G, b=b)
            s = solve(p, debug=True)
            assert s.status == "optimal", s.kkt
            for key, value in s.kkt.items():
                assert value <= 1e-8, (key, value)
            _, obj_oracle = dual_projected_gradient(Q, c, G, b)
            scale = max(1.0, abs(obj_oracle))
            assert abs(s.objective - obj_oracle) <= 1e-6 * scale


class TestDeterminismAndUniqueness:
    def test_bit_identical_repeat(self):
        rng = np.random.default_rng(42)
        Q, c, G, b = random_feasible_problem(rng)
        s1 = solve(QPProblem(Q=Q, c=c, G=G, b=b))
        s2 = solve(QPProblem(Q=Q, c=c, G=G, b=b))
        assert np.array_equal(s1.z, s2.z)
        assert np.array_equal(s1.duals, s2.duals)
        assert s1.iterations == s2.iterations

    def test_unique_optimum_from_different_starts(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            Q, c, G, b = random_feasible_problem(rng)
            p = QPProblem(Q=Q, c=c, G=G, b=b)
            cold = solve(p)
            seeded = solve(
                p, initial_active_set=list(range(min(3, p.n_rows)))
            )
            assert cold.status == "optimal" and seeded.status == "optimal"
            np.testing.assert_allclose(cold.z, seeded.z, atol=1e-8)


class TestWarmStart:
    def test_identical_problem_converges_immediately(self):
        rng = np.random.default_rng(33)
        while True:
            Q, c, G, b = random_feasible_problem(rng)
            p = QPProblem(Q=Q, c=c, G=G, b=b)
            first = solve(p)
            if first.status == "optimal" and first.active_set:
                break
        second = warm_start(p, first.active_set)
        assert second.status == "optimal"
        np.testing.assert_allclose(second.z, first.z, atol=1e-10)
        assert second.iterations <= 1

    def test_small_perturbation_keeps_active_set(self):
        p = QPProblem(
            Q=2.0 * np.eye(2),
            c=np.array([-2.0, 0.0]),
            G=np.array([[1.0, 0.0]]),
            b=np.array([2.0]),
        )
        first = solve(p)
        assert first.active_set == [0]
        perturbed = QPProblem(Q=p.Q, c=p.c + 1e-6, G=p.G, b=p.b)
        second = warm_start(perturbed, first.active_set)
        assert second.active_set == first.active_set
        assert np.abs(second.z - first.z).max() <= 1e-5

    def test_stale_set_discarded_on_dimension_change(self):
        p1 = QPProblem(
            Q=2.0 * np.eye(1),
            c=np.array([-2.0]),
            G=np.array([[1.0], [-1.0]]),
            b=np.array([2.0, -10.0]),
        )
        first = solve(p1)
        p2 = QPProblem(
            Q=2.0 * np.eye(1), c=np.array([-2.0]), G=np.array([[1.0]]), b=np.array([2.0])
        )
        stale = [5, 1]  # out of range for p2
        second = warm_start(p2, stale)
        assert second.status == "optimal"
        assert second.z[0] == pytest.approx(2.0, abs=1e-12)
        assert first.z[0] == pytest.approx(2.0, abs=1e-12)


class TestDegenerate:
    def test_duplicate_rows(self):
        # Identical rows: multipliers split but the optimizer is unique.
        p = QPProblem(
            Q=2.0 * np.eye(2),
            c=np.array([-2.0, -2.0]),
            G=np.array([[1.0, 1.0], [1.0, 1.0]]),
            b=np.array([3.0, 3.0]),
        )
        s = solve(p)
        assert s.status == "optimal"
        assert s.z[0] + s.z[1] == pytest.approx(3.0, abs=1e-10)

    def test_zero_row_never_activates(self):
        p = QPProblem(
            Q=2.0 * np.eye(1),
            c=np.array([-2.0]),
            G=np.array([[0.0]]),
            b=np.array([-0.5]),  # 0 >= -0.5 always true
        )
        s = solve(p)
        assert s.status == "optimal"
        assert s.z[0] == pytest.approx(1.0)
        assert s.duals[0] == 0.0
