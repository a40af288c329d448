import itertools
import math
import unittest
import sys
from pathlib import Path

# Add parent directory to path so imports work
sys.path.insert(0, str(Path(__file__).parent.parent))

from core.errors import RegimeError, ValidationError
from core.set_system import SetSystem, coverage_count
from cover.maxcov import (
    MaxCovParams,
    MaxCoverageCover,
    amplification_constant,
    amplification_repeats,
    dp_max_cover_amplified,
    dp_max_cover_expected,
    partial_cover_via_maxcov,
    regime_upper,
    search_call_budget,
    search_schedule,
)
from oracle.exact import exact_partial_cover
from oracle.generators import gen_random_set_system
from privacy.budget import PrivacyBudget
from privacy.noise import NoiseSource


def best_k_coverage(system, k):
    return max(coverage_count(system, family) for family in itertools.combinations(range(system.m), k))


def greedy_max_cover(system, k):
    """Classical greedy max coverage, smallest id on ties."""
    chosen, covered = [], set()
    for _ in range(k):
        best = max(
            (s for s in range(system.m) if s not in chosen),
            key=lambda s: (len(set(system.members(s)) - covered), -s),
        )
        chosen.append(best)
        covered |= set(system.members(best))
    return chosen


class TestMaxCovParams(unittest.TestCase):
    """Test cases for the amplification constants."""

    def test_repeats(self):
        self.assertEqual(amplification_repeats(100), 12)
        self.assertEqual(amplification_repeats(1), 1)
        self.assertEqual(MaxCovParams(3, 1.0, 1e-6).repeats(100), 12)

    def test_constant(self):
        expected = (1 - 1 / math.e - 0.5) * math.log(1.5) / 2
        self.assertAlmostEqual(amplification_constant(), expected)
        with self.assertRaises(ValueError):
            amplification_constant(0.7)

    def test_repeat_budget(self):
        share = MaxCovParams(3, 1.2, 1.2e-6).repeat_budget(100)
        self.assertAlmostEqual(share.epsilon, 0.1)
        self.assertAlmostEqual(share.delta, 1e-7)

    def test_search_schedule(self):
        """ρ = 0.8 gives ρ′ = 0.9 and t = ⌈log_0.85(0.1)⌉ = 15."""
        rho_prime, passes, slots = search_schedule(1024, 0.8)
        self.assertAlmostEqual(rho_prime, 0.9)
        self.assertEqual(passes, 15)
        self.assertAlmostEqual(slots, 10.0)

    def test_search_call_budget(self):
        """15 passes, 10 slots: one guess (30 amplified charges of ε′ plus one Laplace) costs 2ε/10."""
        per_call = search_call_budget(PrivacyBudget(3.0, 1e-6), 15, 10.0)
        self.assertAlmostEqual(per_call.epsilon, 6.0 / 310)
        self.assertAlmostEqual(per_call.delta, 1e-6 / 150)
        self.assertAlmostEqual(10 * (2 * 15 + 1) * per_call.epsilon, 6.0)

    def test_invalid(self):
        with self.assertRaises(ValueError):
            MaxCovParams(-1, 1.0, 1e-6)
        with self.assertRaises(ValueError):
            MaxCovParams(1, 1.0, 0.0)


class TestDPMaxCover(unittest.TestCase):
    """Test cases for the private max-coverage routines."""

    def setUp(self):
        self.system = gen_random_set_system(30, 12, seed=21)
        self.budget = PrivacyBudget(4.0, 1e-6)

    def test_budget_bounds(self):
        self.assertEqual(dp_max_cover_expected(self.system, 0, self.budget, NoiseSource()), [])
        self.assertEqual(dp_max_cover_amplified(self.system, 0, self.budget, NoiseSource()), [])
        with self.assertRaises(ValidationError):
            dp_max_cover_expected(self.system, 13, self.budget, NoiseSource())
        with self.assertRaises(ValidationError):
            dp_max_cover_amplified(self.system, 13, self.budget, NoiseSource())

    def test_full_budget_takes_every_set(self):
        chosen = dp_max_cover_expected(self.system, 12, self.budget, NoiseSource(2))
        self.assertEqual(sorted(chosen), list(range(12)))
        self.assertEqual(coverage_count(self.system, chosen), 30)

    def test_zero_noise_is_classical_greedy(self):
        noise = NoiseSource.zero_noise()
        for k in range(1, 6):
            expected = greedy_max_cover(self.system, k)
            self.assertEqual(dp_max_cover_expected(self.system, k, self.budget, noise), expected)
            self.assertEqual(dp_max_cover_amplified(self.system, k, self.budget, noise), expected)

    def test_zero_noise_coverage_monotone_in_k(self):
        noise = NoiseSource.zero_noise()
        coverages = [
            coverage_count(self.system, dp_max_cover_expected(self.system, k, self.budget, noise))
            for k in range(self.system.m + 1)
        ]
        self.assertTrue(all(a <= b for a, b in zip(coverages, coverages[1:])))

    def test_no_duplicates(self):
        parent = NoiseSource(8)
        for i in range(50):
            for routine in (dp_max_cover_expected, dp_max_cover_amplified):
                chosen = routine(self.system, 4, self.budget, parent.spawn(i))
                self.assertEqual(len(set(chosen)), 4)

    def test_residual_restriction(self):
        """Picks stay inside `candidates` and gains only count `uncovered` elements."""
        candidates = [1, 3, 5, 7]
        chosen = dp_max_cover_expected(
            self.system, 2, self.budget, NoiseSource(1), candidates=candidates, uncovered=0b1111
        )
        self.assertTrue(set(chosen) <= set(candidates))

    def test_expectation_bound(self):
        """Mean coverage >= (1 - 1/e)·OPT_k - 2k·ln(n)/ε₀ at n = 30, m = 12, k = 3, ε = 4."""
        opt_k = best_k_coverage(self.system, 3)
        eps0 = MaxCovParams(3, 4.0, 1e-6).epsilon0
        parent = NoiseSource(5)
        total = sum(
            coverage_count(self.system, dp_max_cover_expected(self.system, 3, self.budget, parent.spawn(i)))
            for i in range(500)
        )
        self.assertGreaterEqual(total / 500, (1 - 1 / math.e) * opt_k - 2 * 3 * math.log(30) / eps0)

    def test_amplified_ratio(self):
        """At least 80% of 300 amplified runs cover 0.15·OPT_k (n = 40, m = 12, k = 3)."""
        system = gen_random_set_system(40, 12, seed=22)
        opt_k = best_k_coverage(system, 3)
        parent = NoiseSource(6)
        good = sum(
            coverage_count(system, dp_max_cover_amplified(system, 3, self.budget, parent.spawn(i))) >= 0.15 * opt_k
            for i in range(300)
        )
        self.assertGreaterEqual(good, 240)


class TestPartialCoverViaMaxCov(unittest.TestCase):
    """Test cases for the max-coverage binary search."""

    def test_regime_error_below_bound(self):
        system = gen_random_set_system(30, 12, seed=1)
        self.assertLess(regime_upper(30, 0.6, PrivacyBudget(1.0, 1e-6)), 1)
        with self.assertRaises(RegimeError):
            partial_cover_via_maxcov(system, 0.6, PrivacyBudget(1.0, 1e-6), NoiseSource())

    def test_upper_needing_too_many_guesses(self):
        system = gen_random_set_system(8, 10, seed=1)
        with self.assertRaises(ValidationError):
            partial_cover_via_maxcov(system, 0.5, PrivacyBudget(1.0, 1e-6), NoiseSource(), upper=8)

    def test_preconditions(self):
        with self.assertRaises(ValidationError):
            partial_cover_via_maxcov(SetSystem.from_sets(1, [[0]]), 0.5, PrivacyBudget(1.0, 1e-6), NoiseSource())
        with self.assertRaises(ValidationError):
            partial_cover_via_maxcov(SetSystem.from_sets(4, [[0]]), 0.5, PrivacyBudget(1.0, 1e-6), NoiseSource(),
                                     upper=1)

    def test_single_set_witness(self):
        """One set covering ρn: the zero-noise search settles on guess 1 with |SOL| <= t."""
        system = SetSystem.from_sets(20, [list(range(16)), [16], [17], [18], [19]])
        traces = []
        chosen = partial_cover_via_maxcov(
            system, 0.8, PrivacyBudget(1.0, 1e-6), NoiseSource.zero_noise(), upper=4, traces=traces
        )
        _, passes, _ = search_schedule(20, 0.8)
        self.assertEqual(chosen[0], 0)
        self.assertLessEqual(len(chosen), passes)
        self.assertEqual(min(t.guess for t in traces if t.accepted), 1)

    def test_zero_noise_accepted_guesses_up_closed(self):
        """64 singletons, ρ = 0.5, 9 passes per guess: guesses >= 4 reach 32 elements, 3 does not."""
        system = SetSystem.from_sets(64, [[e] for e in range(64)])
        traces = []
        chosen = partial_cover_via_maxcov(
            system, 0.5, PrivacyBudget(1000.0, 1e-6), NoiseSource.zero_noise(), upper=32, traces=traces
        )
        accepted = {t.guess for t in traces if t.accepted}
        rejected = {t.guess for t in traces if not t.accepted}
        self.assertEqual(sorted(t.guess for t in traces), [2, 3, 4, 8, 16])
        self.assertTrue(all(r < a for r in rejected for a in accepted))
        self.assertEqual(min(accepted), 4)
        self.assertEqual(len(chosen), 36)

    def test_pseudo_approximation(self):
        """n = 200, m = 20, ρ = 0.6, ε = 8: |SOL| <= t·OPT and coverage >= ρn - ln(n)/ε′ in 80% of runs."""
        system = gen_random_set_system(200, 20, density=0.3, seed=31)
        opt = exact_partial_cover(system, 0.999).opt_value
        _, passes, slots = search_schedule(200, 0.6)
        eps_call = search_call_budget(PrivacyBudget(8.0, 1e-6), passes, slots).epsilon
        floor = 0.6 * 200 - math.log(200) / eps_call
        parent = NoiseSource(41)
        good = 0
        for i in range(50):
            chosen = partial_cover_via_maxcov(system, 0.6, PrivacyBudget(8.0, 1e-6), parent.spawn(i), upper=20)
            good += len(chosen) <= passes * opt and coverage_count(system, chosen) >= floor
        self.assertGreaterEqual(good, 40)


class TestMaxCoverageCover(unittest.TestCase):

    def test_solve_records_traces_and_ledger(self):
        system = SetSystem.from_sets(20, [list(range(16)), [16], [17], [18], [19]])
        solver = MaxCoverageCover(epsilon=1.0, delta=1e-6, upper=4)
        chosen = solver.solve(system, 0.8, NoiseSource.zero_noise())
        self.assertEqual(chosen[0], 0)
        self.assertTrue(solver.traces_)
        self.assertTrue(solver.ledger_.total().isclose(PrivacyBudget(2.0, 1e-6)))

    def test_invalid_upper(self):
        with self.assertRaises(ValueError):
            MaxCoverageCover(upper=0)


if __name__ == "__main__":
    unittest.main()
