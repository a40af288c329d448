import importlib.util
import unittest
import sys
from pathlib import Path

# Add parent directory to path so imports work
sys.path.insert(0, str(Path(__file__).parent.parent))

from data.csv import BENCH_HEADER, ResultCsv


@unittest.skipUnless(importlib.util.find_spec("matplotlib"), "matplotlib is not installed")
class TestPlotSeries(unittest.TestCase):
    """Test cases for splitting a bench table into plot series."""

    def setUp(self):
        self.table = ResultCsv(BENCH_HEADER)
        for k in (3, 2):
            for eps, mean in ((0.5, ""), (4.0, 0.1 * k)):
                self.table.add_row(dict(problem="vacc", k=k, eps=eps, objective_mean=mean, objective_std=0.01,
                                        baseline_objective=0.05 * k))

    def test_one_line_per_epsilon_against_k(self):
        from scripts.plot_bench import series

        x_label, private, baseline = series(self.table)
        self.assertEqual(x_label, "k")
        self.assertEqual(list(private), [4.0])
        self.assertEqual([p[0] for p in private[4.0]], [2.0, 3.0])
        self.assertAlmostEqual(private[4.0][1][1], 0.3)
        self.assertEqual([b[0] for b in baseline], [2.0, 3.0])
        self.assertAlmostEqual(baseline[1][1], 0.15)

    def test_psc_sweeps_use_rho(self):
        from scripts.plot_bench import series

        table = ResultCsv(BENCH_HEADER)
        table.add_row(dict(problem="psc", rho=0.8, eps=1.0, objective_mean=0.9, baseline_objective=0.85))
        x_label, private, baseline = series(table)
        self.assertEqual((x_label, baseline), ("rho", [(0.8, 0.85)]))
        self.assertEqual(private, {1.0: [(0.8, 0.9, 0.0)]})


if __name__ == "__main__":
    unittest.main()
