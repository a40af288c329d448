import io
import unittest
import sys
from pathlib import Path

# Add parent directory to path so imports work
sys.path.insert(0, str(Path(__file__).parent.parent))

import numpy as np

from core.errors import ParseError, ValidationError
from core.set_system import SetSystem
from core.vacc import Metric, VaccInstance
from data.formats import dump_set_system, dump_vacc_instance, load_set_system, load_vacc_instance

FIXTURES = Path(__file__).parent.parent / "fixtures" / "v1"


class TestSetSystemFormat(unittest.TestCase):
    """Test cases for the set-system text format."""

    def test_load(self):
        text = b"# comment\n4 3\n0: 0 1   # trailing comment\n2: 3\n\n"
        system = load_set_system(text)
        self.assertEqual(system.n, 4)
        self.assertEqual(system.m, 3)
        self.assertEqual(system.members(0), [0, 1])
        self.assertEqual(system.members(1), [])
        self.assertEqual(system.members(2), [3])

    def test_load_from_stream_and_path(self):
        system = load_set_system(io.StringIO("2 1\n0: 0 1\n"))
        self.assertTrue(system.is_coverable())
        star = load_set_system(FIXTURES / "star_10.txt")
        self.assertEqual((star.n, star.m), (9, 10))

    def test_parse_errors_carry_line_numbers(self):
        with self.assertRaises(ParseError) as ctx:
            load_set_system(b"3 1\n0 1 2\n")
        self.assertEqual(ctx.exception.line_number, 2)
        self.assertIn("line 2", str(ctx.exception))
        with self.assertRaises(ParseError):
            load_set_system(b"3 1\n0: x\n")
        with self.assertRaises(ParseError):
            load_set_system(b"")
        with self.assertRaises(ParseError):
            load_set_system(b"\xff\xfe")

    def test_validation_errors(self):
        """Out-of-range ids, repeated sets and duplicate elements."""
        for text in (b"3 1\n0: 3\n", b"3 1\n1: 0\n", b"3 2\n0: 0\n0: 1\n", b"3 1\n0: 1 1\n"):
            with self.subTest(text=text):
                with self.assertRaises(ValidationError):
                    load_set_system(text)

    def test_tab_separated_fields(self):
        system = load_set_system(b"4\t2\n0\t:\t0\t1\n1:\t2 3\n")
        self.assertEqual(system.members(0), [0, 1])
        self.assertEqual(system.members(1), [2, 3])

    def test_dump_then_load(self):
        system = SetSystem.from_sets(5, [[0, 4], [], [1, 2, 3]])
        text = dump_set_system(system, comments=["generated"])
        self.assertTrue(text.startswith("# generated\n5 3\n0: 0 4\n1:\n"))
        self.assertEqual(load_set_system(text.encode()), system)


class TestVaccFormat(unittest.TestCase):
    """Test cases for the vacc-instance text format."""

    def test_load_fixture(self):
        instance = load_vacc_instance(FIXTURES / "two_cluster_line.vacc")
        self.assertEqual(instance.n_people, 24)
        self.assertEqual(instance.n_locations, 6)
        self.assertEqual(instance.k, 2)
        self.assertEqual(instance.rho.rho, 0.9)
        self.assertEqual(instance.location_labels, ("a0", "a1", "a2", "b0", "b1", "b2"))
        self.assertAlmostEqual(instance.metric.scale, 10.0)
        self.assertAlmostEqual(instance.metric.distance(0, 1), 0.1)

    def test_overrides(self):
        instance = load_vacc_instance(FIXTURES / "two_cluster_line.vacc", k=3, rho=0.5)
        self.assertEqual(instance.k, 3)
        self.assertEqual(instance.rho.rho, 0.5)

    def test_dist_block(self):
        text = b"2 3\nloc x\ndist x y 2\ndist x z 4\ndist y z 2\nperson p: x\nperson q: z y\n"
        instance = load_vacc_instance(text)
        self.assertEqual(instance.location_labels, ("x", "y", "z"))
        self.assertAlmostEqual(instance.metric.distance(0, 1), 0.5)
        self.assertEqual(instance.visits[1], (1, 2))
        self.assertEqual((instance.k, instance.rho.rho), (1, 0.8))

    def test_tab_separated_directives(self):
        text = b"2\t2\nk\t2\nrho\t0.5\nloc\ta\t0\nloc b\t3\nperson\tp:\ta\nperson q:\tb a\n"
        instance = load_vacc_instance(text)
        self.assertEqual((instance.k, instance.rho.rho), (2, 0.5))
        self.assertEqual(instance.location_labels, ("a", "b"))
        self.assertEqual(instance.visits, ((0,), (0, 1)))

    def test_errors(self):
        cases = {
            "mixed blocks": (b"1 2\nloc a 0\ndist a b 1\nperson p: a\n", ParseError),
            "unknown directive": (b"1 1\nplace a\n", ParseError),
            "unknown location": (b"1 1\nloc a 0\nperson p: b\n", ValidationError),
            "empty visit": (b"1 1\nloc a 0\nperson p:\n", ValidationError),
            "count mismatch": (b"2 1\nloc a 0\nperson p: a\n", ValidationError),
            "missing pair": (b"1 3\nloc a\ndist a b 1\ndist a c 1\nperson p: a\n", ValidationError),
            "triangle": (b"1 3\nloc a\ndist a b 1\ndist b c 1\ndist a c 5\nperson p: a\n", ValidationError),
        }
        for name, (text, error) in cases.items():
            with self.subTest(name=name):
                with self.assertRaises(error):
                    load_vacc_instance(text)

    def test_dump_then_load_keeps_metric(self):
        points = np.array([[0.0, 0.0], [3.0, 4.0], [6.0, 0.0]])
        instance = VaccInstance([[0, 1], [2]], Metric.from_points(points), k=2, rho=0.5)
        again = load_vacc_instance(dump_vacc_instance(instance).encode())
        self.assertEqual(again.visits, instance.visits)
        self.assertEqual((again.k, again.rho.rho), (2, 0.5))
        np.testing.assert_allclose(again.metric.distances, instance.metric.distances)

    def test_dump_matrix_metric(self):
        metric = Metric.from_matrix([[0, 2, 4], [2, 0, 2], [4, 2, 0]])
        instance = VaccInstance([[0], [2]], metric)
        text = dump_vacc_instance(instance, include_params=False)
        self.assertIn("dist 0 2 4.0", text)
        self.assertNotIn("\nk ", text)
        np.testing.assert_allclose(load_vacc_instance(text.encode()).metric.distances, metric.distances)


if __name__ == "__main__":
    unittest.main()
