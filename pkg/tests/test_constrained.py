"""Family feasibility, Moebius search, minimal norms, constructive solve,
and the finite-section distance to the constrained algebra."""

import numpy as np
import pytest

from cnpick import (
    FourierFunction,
    InfeasibleError,
    InvalidInputError,
    ScalarProblem,
    SphereDomain,
    boundary_sup_norm,
    dist_to_subalgebra,
    family_feasibility,
    feasibility_via_moebius,
    minimal_norm,
    minimal_norm_zero,
    moebius_search,
    moebius_test_matrix,
    solve,
    zero_node_matrix,
)
from cnpick.constrained_pick import derivative_at_origin

rng = np.random.default_rng(2718)

# frozen from the independent bisection + lambda-grid oracle
# (notes kept with the repo history; rerun gives 0.6420858121477065)
MINIMAL_NORM_GOLDEN = 0.6420858121477065


def random_problem(n, lo=0.25, hi=0.85, min_sep=5e-2):
    while True:
        z = rng.uniform(lo, hi, n) * np.exp(2j * np.pi * rng.uniform(0, 1, n))
        if n == 1 or min(abs(z[i] - z[j]) for i in range(n)
                         for j in range(i + 1, n)) > min_sep:
            break
    w = rng.uniform(0, 1.0, n) * np.exp(2j * np.pi * rng.uniform(0, 1, n))
    return ScalarProblem(tuple(z), tuple(w))


class TestFamilyFeasibility:
    def test_square_witness_feasible(self):
        rep = family_feasibility(ScalarProblem((0, 0.5), (0, 0.25)), 1.0)
        assert rep.min_eig >= -1e-9
        assert rep.status in ("feasible", "marginal")

    def test_metric_bound_infeasible(self):
        rep = family_feasibility(ScalarProblem((0, 0.5), (0, 0.26)), 1.0)
        assert rep.status == "infeasible"
        assert rep.certified
        assert rep.worst_param is not None

    def test_single_node_marginal_at_modulus(self):
        rep = family_feasibility(ScalarProblem((0.4,), (0.3j,)), abs(0.3))
        assert rep.status == "marginal"
        assert abs(rep.min_eig) < 1e-12

    def test_monotone_in_bound(self):
        prob = random_problem(3)
        order = {"infeasible": 0, "marginal": 1, "feasible": 2}
        last = -1
        for bound in np.linspace(0.3, 4.0, 10):
            rep = family_feasibility(prob, bound)
            assert order[rep.status] >= last
            last = order[rep.status]

    def test_bad_bound(self):
        with pytest.raises(InvalidInputError):
            family_feasibility(ScalarProblem((0,), (0,)), -1.0)


class TestMoebiusSearch:
    def test_square_case_forced_lambda(self):
        lam = moebius_search(ScalarProblem((0, 0.5), (0, 0.25)))
        assert lam is not None
        assert lam.value == 0
        m = moebius_test_matrix((0, 0.5), (0, 0.25), 0.0)
        assert np.abs(m.entries).max() < 1e-15  # identically zero matrix

    def test_single_node_strictly_feasible(self):
        lam = moebius_search(ScalarProblem((0.5,), (0.3,)))
        assert lam is not None

    def test_metric_bound_absent(self):
        assert moebius_search(ScalarProblem((0, 0.5), (0, 0.26))) is None

    def test_big_targets_rejected(self):
        with pytest.raises(InvalidInputError):
            moebius_search(ScalarProblem((0.5,), (1.5,)))

    def test_via_moebius_report(self):
        rep = feasibility_via_moebius(ScalarProblem((0.3, 0.5), (0.1, 0.2)), 1.0)
        assert rep.status in ("feasible", "marginal")
        assert rep.witness_lambda is not None
        assert rep.certified


class TestEquivalenceOfCriteria:
    @pytest.mark.parametrize("trial", range(25))
    def test_family_agrees_with_moebius(self, trial):
        n = int(rng.integers(2, 5))
        prob = random_problem(n)
        if rng.uniform() < 0.5:
            astar, _ = minimal_norm(prob)
            if astar > 0:
                prob = ScalarProblem(
                    prob.nodes,
                    tuple(prob.target_values() / astar * rng.uniform(0.3, 0.98)),
                )
        rep = family_feasibility(prob, 1.0)
        if abs(rep.min_eig) < 1e-4:
            pytest.skip("margin below the decision threshold")
        lam = moebius_search(prob)
        assert (rep.min_eig >= -1e-9) == (lam is not None)

    def test_necessity_of_family_condition(self):
        # whenever solve succeeds, the family report cannot be infeasible
        for _ in range(6):
            prob = random_problem(3)
            astar, _ = minimal_norm(prob)
            f = solve(prob, 1.05 * astar)
            rep = family_feasibility(prob, f.scale)
            assert rep.status != "infeasible"


class TestMinimalNorm:
    def test_single_node(self):
        a, _ = minimal_norm(ScalarProblem((0.4,), (0.3 - 0.2j,)))
        assert a == pytest.approx(abs(0.3 - 0.2j), abs=1e-9)

    def test_golden_four(self):
        a, _ = minimal_norm(ScalarProblem((0, 0.5), (0, 1)))
        assert a == pytest.approx(4.0, abs=1e-6)

    def test_bisection_oracle_case(self):
        a, _ = minimal_norm(ScalarProblem((0.3, 0.5), (0.1, 0.2)))
        assert a == pytest.approx(MINIMAL_NORM_GOLDEN, abs=2e-6)

    def test_bracket_transition(self):
        # at A*(1+eps) not infeasible; at A*(1-eps) not strictly feasible
        prob = ScalarProblem((0.3, 0.5), (0.1, 0.2))
        a, _ = minimal_norm(prob)
        up = family_feasibility(prob, a * (1 + 1e-6))
        down = family_feasibility(prob, a * (1 - 1e-6))
        assert up.status in ("feasible", "marginal")
        assert down.status in ("marginal", "infeasible")

    def test_scaling_covariance(self):
        prob = random_problem(3)
        a1, _ = minimal_norm(prob)
        c = 0.37 * np.exp(1.1j)
        a2, _ = minimal_norm(ScalarProblem(prob.nodes, tuple(c * prob.target_values())))
        assert a2 == pytest.approx(abs(c) * a1, abs=1e-8 * max(1, a1))

    def test_rotation_covariance(self):
        prob = random_problem(3)
        a1, _ = minimal_norm(prob)
        rot = np.exp(0.9j)
        a2, _ = minimal_norm(ScalarProblem(tuple(rot * prob.node_values()),
                                           prob.targets))
        assert a2 == pytest.approx(a1, rel=1e-6)

    @pytest.mark.parametrize("trial", range(8))
    def test_zero_node_consistency(self, trial):
        n = int(rng.integers(2, 5))
        while True:
            others = rng.uniform(0.15, 0.85, n - 1) * np.exp(
                2j * np.pi * rng.uniform(0, 1, n - 1))
            if n == 2 or min(abs(others[i] - others[j])
                             for i in range(n - 1)
                             for j in range(i + 1, n - 1)) > 5e-2:
                break
        z = np.concatenate(([0.0 + 0j], others))
        w = rng.uniform(0.05, 1.2, n) * np.exp(2j * np.pi * rng.uniform(0, 1, n))
        prob = ScalarProblem(tuple(z), tuple(w))
        a_scan, _ = minimal_norm(prob)
        a_exact = minimal_norm_zero(prob)
        assert a_scan == pytest.approx(a_exact, rel=1e-6)


class TestZeroNodeMatrix:
    def test_single_origin_node(self):
        m = zero_node_matrix(ScalarProblem((0,), (0.5,)), 1.0)
        assert np.allclose(m.entries, np.diag([0.75, 0.75]))

    def test_marginal_square_case(self):
        m = zero_node_matrix(ScalarProblem((0, 0.5), (0, 0.25)), 1.0)
        expected = np.array([
            [1.0, 0.0, 1.0],
            [0.0, 1.0, 0.5],
            [1.0, 0.5, 1.25],
        ])
        assert np.allclose(m.entries, expected)
        assert abs(np.linalg.det(m.entries)) < 1e-12

    def test_beyond_metric_not_psd(self):
        m = zero_node_matrix(ScalarProblem((0, 0.5), (0, 0.26)), 1.0)
        assert np.linalg.eigvalsh(m.entries)[0] < -1e-9

    def test_requires_origin(self):
        with pytest.raises(InvalidInputError, match="origin"):
            zero_node_matrix(ScalarProblem((0.3, 0.5), (0, 0)), 1.0)


class TestMinimalNormZero:
    def test_marginal_case_is_one(self):
        assert minimal_norm_zero(ScalarProblem((0, 0.5), (0, 0.25))) == pytest.approx(1.0, abs=1e-9)

    def test_golden_four(self):
        assert minimal_norm_zero(ScalarProblem((0, 0.5), (0, 1))) == pytest.approx(4.0, abs=1e-12)

    def test_single_node(self):
        assert minimal_norm_zero(ScalarProblem((0,), (0.4j,))) == pytest.approx(0.4, abs=1e-12)


class TestSolve:
    def test_square_boundary_case(self):
        f = solve(ScalarProblem((0, 0.5), (0, 0.25)), 1.0)
        assert abs(f(0.5) - 0.25) < 1e-12
        assert abs(f(0.3) - 0.09) < 1e-12  # f is z^2 exactly
        assert derivative_at_origin(f) <= 1e-7
        assert boundary_sup_norm(f) <= 1 + 1e-7

    def test_single_node_postconditions(self):
        prob = ScalarProblem((0.4,), (0.2,))
        f = solve(prob, 1.0)
        assert abs(f(0.4) - 0.2) <= 1e-7
        assert derivative_at_origin(f) <= 1e-7
        assert boundary_sup_norm(f) <= 1 + 1e-7

    def test_near_minimal_bound(self):
        prob = ScalarProblem((0.3, 0.5), (0.1, 0.2))
        astar, _ = minimal_norm(prob)
        bound = 1.01 * astar
        f = solve(prob, bound)
        assert np.abs(f(prob.node_values()) - prob.target_values()).max() <= 1e-7 * bound
        assert derivative_at_origin(f) <= 1e-7 * bound
        assert boundary_sup_norm(f) <= bound * (1 + 1e-7)

    def test_infeasible_raises_with_report(self):
        with pytest.raises(InfeasibleError) as exc:
            solve(ScalarProblem((0, 0.5), (0, 0.26)), 1.0)
        assert exc.value.report is not None
        assert exc.value.report.status == "infeasible"

    def test_origin_only_constant(self):
        f = solve(ScalarProblem((0,), (0.3 + 0.1j,)), 1.0)
        assert abs(f(0.7j) - (0.3 + 0.1j)) < 1e-12  # constant interpolant


class TestDistToSubalgebra:
    def test_members_have_zero_distance(self):
        light = SphereDomain(coarse_grid=(16, 32), refine_rounds=1)
        f = FourierFunction({0: 0.4 - 0.2j, 2: 0.3, 5: 0.1j, 8: -0.05})
        value, _ = dist_to_subalgebra(f, 2 * 8 + 4, light)
        assert value <= 1e-10

    def test_negative_frequency_distance_one(self):
        value, estimate = dist_to_subalgebra(FourierFunction({-1: 1.0}), 16)
        assert abs(value - 1.0) <= estimate + 1e-9

    def test_shift_golden_from_doubled_truncation(self):
        # independent oracle at 2N = 32 gives 1.0 (max at the r = 1 chart point)
        value, estimate = dist_to_subalgebra(FourierFunction({1: 1.0}), 16)
        assert abs(value - 1.0) <= estimate + 1e-9

    def test_truncation_too_small(self):
        with pytest.raises(InvalidInputError):
            dist_to_subalgebra(FourierFunction({3: 1.0}), 8)

    def test_bad_frequency(self):
        with pytest.raises(InvalidInputError):
            FourierFunction({1.5: 1.0})
