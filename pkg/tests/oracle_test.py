import itertools
import math
import unittest
import sys
from pathlib import Path

# Add parent directory to path so imports work
sys.path.insert(0, str(Path(__file__).parent.parent))

import numpy as np

from core.errors import InfeasibleError, OracleLimitError, ValidationError
from core.set_system import SetSystem, coverage_count
from core.vacc import Metric, VaccInstance, objective_percentile
from cover.greedy import partial_set_cover_greedy
from data.formats import load_set_system, load_vacc_instance
from oracle import GreedyBaseline, OracleResult, exact_client_cover, exact_partial_cover
from oracle.baseline import greedy_partial_cover, nonprivate_client_cover
from oracle.generators import gen_random_set_system
from privacy.budget import PrivacyBudget
from privacy.noise import NoiseSource

FIXTURES = Path(__file__).parent.parent / "fixtures" / "v1"


def brute_force_cover(system, rho):
    """Independent check: scan families by size, lexicographic inside a size."""
    target = math.ceil(rho * system.n - 1e-9)
    for size in range(1, system.m + 1):
        for family in itertools.combinations(range(system.m), size):
            if coverage_count(system, family) >= target:
                return size, family
    return None


class TestExactPartialCover(unittest.TestCase):
    """Test cases for the exhaustive Partial Set Cover oracle."""

    def test_disjoint_singletons(self):
        system = SetSystem.from_sets(4, [[0], [1], [2], [3]])
        result = exact_partial_cover(system, 0.5)
        self.assertEqual(result, OracleResult(2, (0, 1), result.nodes_explored))
        self.assertGreater(result.nodes_explored, 0)

    def test_nested_chain(self):
        """S0 ⊂ S1 ⊂ S2 = U: one set always suffices, S2 when the target needs all of U."""
        system = SetSystem.from_sets(4, [[0], [0, 1], [0, 1, 2, 3]])
        for rho in (0.1, 0.3, 0.5, 0.7, 0.9):
            self.assertEqual(exact_partial_cover(system, rho).opt_value, 1)
        self.assertEqual(exact_partial_cover(system, 0.9).witness, (2,))
        self.assertEqual(exact_partial_cover(system, 0.25).witness, (0,))

    def test_fixture(self):
        result = exact_partial_cover(load_set_system(FIXTURES / "cover_12.txt"), 0.8)
        self.assertEqual((result.opt_value, result.witness), (2, (0, 1)))

    def test_agrees_with_brute_force(self):
        """Random m <= 12 instances: same optimum and same lexicographically smallest witness."""
        for seed in range(30):
            m = 6 + seed % 7
            system = gen_random_set_system(20, m, density=0.25, seed=seed)
            for rho in (0.4, 0.75):
                result = exact_partial_cover(system, rho)
                self.assertEqual((result.opt_value, result.witness), brute_force_cover(system, rho))
                self.assertGreaterEqual(coverage_count(system, result.witness), math.ceil(rho * 20 - 1e-9))

    def test_limits(self):
        with self.assertRaises(OracleLimitError):
            exact_partial_cover(SetSystem.from_sets(25, [[e] for e in range(25)]), 0.5)
        with self.assertRaises(ValueError):
            exact_partial_cover(SetSystem.from_sets(4, [[0]]), 0.5)


class TestExactClientCover(unittest.TestCase):
    """Test cases for the exhaustive client-cover oracle."""

    def test_two_cluster_fixture(self):
        """Hand computation: a1 and b1 serve everyone within one unit of 10."""
        instance = load_vacc_instance(FIXTURES / "two_cluster_line.vacc")
        result = exact_client_cover(instance)
        self.assertAlmostEqual(result.opt_value, 0.1)
        self.assertEqual(result.witness, (1, 4))
        self.assertEqual(result.nodes_explored, 15)

    def test_all_locations_open(self):
        instance = load_vacc_instance(FIXTURES / "two_cluster_line.vacc")
        result = exact_client_cover(instance, k=6)
        self.assertEqual(result.opt_value, 0.0)
        self.assertEqual(exact_client_cover(instance, k=10).witness, tuple(range(6)))

    def test_single_location(self):
        instance = VaccInstance([[0], [0], [0]], Metric.from_points([0.0]), k=1, rho=0.5)
        result = exact_client_cover(instance, k=1)
        self.assertEqual(result.witness, (0,))
        self.assertEqual(result.opt_value, objective_percentile(instance, [0]))

    def test_one_facility_on_a_line(self):
        """Facility 1 serves the two people at 4 and leaves one at distance 1."""
        instance = VaccInstance([[0], [1], [1]], Metric.from_points([0.0, 4.0]), k=1, rho=0.5)
        result = exact_client_cover(instance)
        self.assertEqual((result.opt_value, result.witness), (0.0, (1,)))
        self.assertEqual(exact_client_cover(instance, rho=0.9).opt_value, 1.0)

    def test_rho_override(self):
        instance = load_vacc_instance(FIXTURES / "two_cluster_line.vacc")
        self.assertEqual(exact_client_cover(instance, k=2, rho=0.5).opt_value, 0.0)

    def test_limits(self):
        instance = VaccInstance([[0]], Metric.from_points(np.arange(30.0)), k=15)
        with self.assertRaises(OracleLimitError):
            exact_client_cover(instance)
        with self.assertRaises(ValueError):
            exact_client_cover(instance, k=0)


class TestGreedyBaseline(unittest.TestCase):
    """Test cases for the non-private baselines."""

    def test_single_covering_set(self):
        system = SetSystem.from_sets(5, [[0, 1], [0, 1, 2, 3, 4], [4]])
        self.assertEqual(greedy_partial_cover(system, 0.9), [1])

    def test_uncoverable_target(self):
        with self.assertRaises(ValidationError):
            greedy_partial_cover(SetSystem.from_sets(4, [[0], [1]]), 0.75)

    def test_prefix_of_zero_noise_private_order(self):
        """The baseline stops at ⌈ρn⌉ on the same order the zero-noise solver follows."""
        for seed in range(20):
            system = gen_random_set_system(30, 10, seed=seed)
            baseline = greedy_partial_cover(system, 0.7)
            solution = partial_set_cover_greedy(system, 0.7, PrivacyBudget(1.0, 1e-6), NoiseSource.zero_noise())
            self.assertEqual(baseline, list(solution.permutation[:len(baseline)]))
            self.assertLessEqual(len(baseline), solution.k)

    def test_classical_guarantee(self):
        """n = 60, m = 12: |greedy| <= (ln n + 1)·OPT on 50 random instances."""
        for seed in range(50):
            system = gen_random_set_system(60, 12, seed=500 + seed)
            opt = exact_partial_cover(system, 0.8).opt_value
            self.assertLessEqual(len(greedy_partial_cover(system, 0.8)), (math.log(60) + 1) * opt)

    def test_solver_class(self):
        system = load_set_system(FIXTURES / "cover_12.txt")
        solver = GreedyBaseline()
        chosen = solver.solve(system, 0.8)
        self.assertEqual(chosen, solver.solution_)
        self.assertGreaterEqual(solver.coverage(system, chosen), 10)
        self.assertIsNone(solver.ledger_)


class TestNonPrivateClientCover(unittest.TestCase):
    """Test cases for the non-private client-cover baseline."""

    def setUp(self):
        self.instance = load_vacc_instance(FIXTURES / "two_cluster_line.vacc")

    def test_two_clusters(self):
        solution = nonprivate_client_cover(self.instance, 2 ** -10)
        self.assertEqual(solution.facilities, (1, 4))
        self.assertAlmostEqual(solution.achieved_radius, 0.1)
        self.assertEqual(len(solution.rounds), 10)
        self.assertIsNone(solution.ledger)

    def test_one_facility_one_round_is_infeasible(self):
        """At R = 1/2 no single location reaches 22 of 24 people."""
        with self.assertRaises(InfeasibleError) as ctx:
            nonprivate_client_cover(self.instance.with_params(k=1), 0.5)
        self.assertEqual(len(ctx.exception.diagnostics.facilities), 2)

    def test_invalid_gamma(self):
        with self.assertRaises(ValueError):
            nonprivate_client_cover(self.instance, 1.5)


if __name__ == "__main__":
    unittest.main()
