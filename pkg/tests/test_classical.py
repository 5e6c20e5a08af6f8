"""Moebius maps, Blaschke products, classical Pick feasibility, Schur solver."""

import numpy as np
import pytest

from cnpick import (
    BlaschkeProduct,
    DegenerateDataError,
    InfeasibleError,
    SchurInterpolant,
    blaschke_eval,
    boundary_sup_norm,
    classical_feasibility,
    moebius_map,
    pseudo_metric_dH,
    schur_eval,
    schur_solve,
)

rng = np.random.default_rng(31415)


def random_nodes(n, lo=0.05, hi=0.9, min_sep=5e-2):
    while True:
        z = rng.uniform(lo, hi, n) * np.exp(2j * np.pi * rng.uniform(0, 1, n))
        if n == 1 or min(abs(z[i] - z[j]) for i in range(n)
                         for j in range(i + 1, n)) > min_sep:
            return z


class TestMoebius:
    def test_sends_parameter_to_zero(self):
        assert moebius_map(0.5, 0.5) == 0

    def test_identity_at_zero_parameter(self):
        z = 0.3 - 0.2j
        assert moebius_map(0.0, z) == z

    def test_value_at_origin(self):
        assert moebius_map(0.5, 0.0) == pytest.approx(-0.5)

    def test_involution(self):
        for _ in range(30):
            lam = rng.uniform(0, 0.95) * np.exp(2j * np.pi * rng.uniform())
            z = rng.uniform(0, 1.0) * np.exp(2j * np.pi * rng.uniform())
            back = moebius_map(-lam, moebius_map(lam, z))
            assert abs(back - z) < 1e-13

    def test_maps_closed_disk_to_closed_disk(self):
        lam = 0.6 - 0.2j
        zs = np.exp(2j * np.pi * np.arange(64) / 64)
        assert np.abs(moebius_map(lam, zs)).max() <= 1 + 1e-12


class TestBlaschke:
    def test_single_zero_at_origin(self):
        b = BlaschkeProduct((0.0,))
        assert blaschke_eval(b, 0.3) == pytest.approx(0.3)

    def test_unimodular_on_boundary(self):
        b = BlaschkeProduct((0.5, -0.2 + 0.4j), unimodular_factor=np.exp(0.7j))
        zs = np.exp(2j * np.pi * np.arange(128) / 128)
        assert np.abs(np.abs(blaschke_eval(b, zs)) - 1.0).max() < 1e-12

    def test_vanishes_on_zeros(self):
        b = BlaschkeProduct((0.0, 0.5))
        assert abs(blaschke_eval(b, 0.5)) < 1e-15

    def test_bad_factor(self):
        with pytest.raises(Exception):
            BlaschkeProduct((0.0,), unimodular_factor=2.0)


class TestClassicalFeasibility:
    def test_single_node(self):
        m, status = classical_feasibility([0.0], [0.5], 1.0)
        assert np.allclose(m.entries, [[0.75]])
        assert status == "feasible"

    def test_schwarz_boundary_case(self):
        # f = z is the unique interpolant; Pick matrix [[1,1],[1,1]], min eig 0
        m, status = classical_feasibility([0.0, 0.5], [0.0, 0.5], 1.0)
        assert abs(np.linalg.eigvalsh(m.entries)[0]) < 1e-9
        assert status == "marginal"

    def test_target_beyond_bound_infeasible(self):
        _, status = classical_feasibility([0.0, 0.5], [0.0, 1.0], 1.0)
        assert status == "infeasible"

    def test_monotone_in_bound(self):
        z = random_nodes(3)
        w = rng.uniform(0, 1, 3) * np.exp(2j * np.pi * rng.uniform(0, 1, 3))
        order = {"infeasible": 0, "marginal": 1, "feasible": 2}
        last = -1
        for bound in np.linspace(0.2, 3.0, 12):
            _, status = classical_feasibility(z, w, bound)
            assert order[status] >= last
            last = order[status]

    def test_two_node_zero_target_matches_pseudo_metric(self):
        # targets {0, w} feasible at bound 1 iff |w| <= d_H(z1, z2)
        for _ in range(20):
            z = random_nodes(2)
            d = pseudo_metric_dH(z[1], z[0])
            _, near = classical_feasibility(z, [0.0, 0.97 * d], 1.0)
            _, far = classical_feasibility(z, [0.0, 1.03 * d], 1.0)
            assert near in ("feasible", "marginal")
            assert far == "infeasible"


class TestSchur:
    def test_single_node(self):
        s = schur_solve([0.3], [0.4])
        assert len(s.steps) == 1
        assert schur_eval(s, 0.3) == pytest.approx(0.4)

    def test_singular_data_recovers_identity(self):
        # Pick-singular data {0, 0.5} -> {0, 0.5} forces g(z) = z
        s = schur_solve([0.0, 0.5], [0.0, 0.5])
        assert abs(schur_eval(s, 0.25) - 0.25) <= 1e-8
        assert boundary_sup_norm(s) <= 1 + 1e-9

    def test_empty_chain_constant(self):
        s = SchurInterpolant((), 0.3 + 0.1j)
        assert schur_eval(s, 0.7) == 0.3 + 0.1j

    def test_zero_data_zero_value_at_node(self):
        s = schur_solve([0.0], [0.0])
        assert schur_eval(s, 0.0) == 0

    def test_infeasible_raises_with_min_eig(self):
        with pytest.raises(InfeasibleError) as exc:
            schur_solve([0.0, 0.5], [0.0, 0.9])
        assert exc.value.min_eig < -1e-9

    def test_degenerate_inconsistent_targets(self):
        # |w| = 1 at an interior node forces the constant, 0.2 conflicts
        with pytest.raises((DegenerateDataError, InfeasibleError)):
            schur_solve([0.1, 0.5], [1.0, 0.2])

    def test_degenerate_consistent_targets(self):
        s = schur_solve([0.1, 0.5], [1.0, 1.0])
        assert abs(schur_eval(s, 0.3) - 1.0) < 1e-12

    @pytest.mark.parametrize("trial", range(12))
    def test_random_feasible_roundtrip(self, trial):
        n = int(rng.integers(1, 7))
        z = random_nodes(n)
        # strictly feasible targets sampled from an explicit Schur function
        lam = rng.uniform(0, 0.5) * np.exp(2j * np.pi * rng.uniform())
        w = rng.uniform(0.3, 0.9) * moebius_map(lam, z)
        s = schur_solve(tuple(z), tuple(w))
        assert np.abs(schur_eval(s, z) - w).max() <= 1e-8
        assert boundary_sup_norm(s) <= 1 + 1e-9

    def test_boundary_modulus_property(self):
        # Schur-class closure: |g| <= 1 on the circle
        z = random_nodes(4)
        w = 0.7 * moebius_map(0.2 + 0.1j, z)
        s = schur_solve(tuple(z), tuple(w))
        zs = np.exp(2j * np.pi * np.arange(4096) / 4096)
        assert np.abs(schur_eval(s, zs)).max() <= 1 + 1e-12


class TestBoundarySupNorm:
    def test_square(self):
        assert boundary_sup_norm(lambda z: z * z) == pytest.approx(1.0)

    def test_constant(self):
        assert boundary_sup_norm(lambda z: 0.3 * np.ones_like(z)) == pytest.approx(0.3)

    def test_blaschke_unimodular(self):
        b = BlaschkeProduct((0.4, -0.3j))
        assert boundary_sup_norm(lambda z: blaschke_eval(b, z)) == pytest.approx(1.0, abs=1e-12)

    def test_gap_estimate(self):
        val, gap = boundary_sup_norm(lambda z: z ** 3, samples=64, return_gap=True)
        assert val == pytest.approx(1.0)
        assert 0 < gap < 1.0

    def test_scalar_fallback(self):
        # non-vectorized callables still work
        val = boundary_sup_norm(lambda z: complex(z) ** 2, samples=32)
        assert val == pytest.approx(1.0)
