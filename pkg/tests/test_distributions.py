# pylint: disable=c0111, c0103

import json
import math
import tempfile
import unittest
from pathlib import Path

import numpy as np

from missingmass.distributions import (
    DiscreteDistribution, PartitionSpec, make_distribution, make_family,
    partition_by_threshold, split, split_pieces, split_origin, absorb,
    coarse_bin, truncate_above, parse_spec, load_distribution, piece_count)
from missingmass.errors import (
    NonPositiveWeight, SumTooFarFromOne, BadParam, ThetaOutOfRange,
    NotSplit, NoMidBin, BadPartition, UsageError)

from .util import rng, random_distribution


class Tests(unittest.TestCase):

    def test_make_distribution(self):
        self.assertEqual(make_distribution([0.5, 0.5]).weights.tolist(),
                         [0.5, 0.5])
        self.assertEqual(len(make_distribution([0.2, 0.3, 0.5])), 3)
        with self.assertRaises(NonPositiveWeight):
            make_distribution([0.2, -0.1, 0.9])
        with self.assertRaises(SumTooFarFromOne):
            make_distribution([0.2, 0.3])
        # rounding noise is renormalized away
        dist = make_distribution([1/3 + 1e-9, 1/3, 1/3])
        self.assertAlmostEqual(math.fsum(dist.weights), 1.0, places=14)

    def test_immutable(self):
        dist = make_distribution([0.5, 0.5])
        with self.assertRaises(ValueError):
            dist.weights[0] = 0.7

    def test_families(self):
        self.assertEqual(make_family('uniform', 4).weights.tolist(),
                         [0.25] * 4)
        np.testing.assert_allclose(make_family('zipf', 3, 1.0).weights,
                                   [6/11, 3/11, 2/11], rtol=1e-14)
        np.testing.assert_allclose(make_family('spike', 3, 0.9).weights,
                                   [0.9, 0.05, 0.05], rtol=1e-14)
        geometric = make_family('geometric', 5, 0.5).weights
        np.testing.assert_allclose(geometric[1:] / geometric[:-1], 0.5)
        for kind, param in (('zipf', 0), ('geometric', 1.0),
                            ('spike', 1.5), ('poisson', 1)):
            with self.assertRaises(BadParam):
                make_family(kind, 3, param)
        with self.assertRaises(BadParam):
            make_family('uniform', 0)

    def test_partition_by_threshold(self):
        part = partition_by_threshold(
            make_distribution([0.5, 0.3, 0.1, 0.1]), 2, 10)
        self.assertEqual((part.below, part.mid, part.above),
                         ((2, 3), (1,), (0,)))
        self.assertEqual(part.tau_prime, 2 * part.tau)
        uniform = partition_by_threshold(make_family('uniform', 10), 1, 10)
        self.assertEqual(uniform.mid, tuple(range(10)))
        self.assertEqual(uniform.below + uniform.above, ())
        # tau_prime = 1 here, so 0.99 is mid-range
        part = partition_by_threshold(make_distribution([0.99, 0.01]), 5, 10)
        self.assertEqual((part.below, part.mid, part.above), ((1,), (0,), ()))
        part = partition_by_threshold(make_distribution([0.99, 0.01]), 4, 10)
        self.assertEqual((part.below, part.mid, part.above), ((1,), (), (0,)))
        for theta in (0, 10, -1):
            with self.assertRaises(ThetaOutOfRange):
                partition_by_threshold(make_distribution([0.5, 0.5]),
                                       theta, 10)

    def test_partition_covers_everything(self):
        generator = rng(7)
        for _ in range(50):
            dist = random_distribution(generator, 8)
            part = partition_by_threshold(dist, 1.5, 20)
            indices = part.below + part.mid + part.above
            self.assertEqual(sorted(indices), list(range(8)))

    def test_split_examples(self):
        out = split(make_distribution([0.7, 0.3]), 2, 10)
        np.testing.assert_allclose(out.weights, [0.2, 0.2, 0.3, 0.3],
                                   atol=1e-15)
        out = split(make_distribution([0.05, 0.95]), 5, 10)
        np.testing.assert_allclose(out.weights, [0.05, 0.95])
        small = make_distribution([0.1] * 10)
        self.assertEqual(split(small, 2, 10), small)
        self.assertEqual(split_origin(make_distribution([0.7, 0.3]), 2, 10),
                         [0, 0, 0, 1])

    def test_piece_count_on_exact_multiples(self):
        self.assertEqual(piece_count(0.6, 0.2), 3)
        self.assertEqual(piece_count(0.3, 0.1), 3)
        self.assertEqual(split_pieces(0.6, 0.2)[:-1], [0.2, 0.2])

    def test_split_properties(self):
        generator = rng(11)
        for _ in range(200):
            dist = random_distribution(generator, int(generator.integers(1, 9)),
                                       concentration=0.3)
            n = int(generator.integers(2, 200))
            theta = float(generator.uniform(0.1, min(n - 0.1, 10)))
            out = split(dist, theta, n)
            self.assertAlmostEqual(out.mass, dist.mass, delta=1e-14)
            self.assertTrue(np.all(out.weights < 2 * theta / n))

    def test_split_labels(self):
        dist = make_distribution([0.7, 0.3], labels=["a", "b"])
        self.assertEqual(split(dist, 2, 10).labels,
                         ("a#0", "a#1", "a#2", "b"))

    def test_absorb_example(self):
        dist = DiscreteDistribution([0.05, 0.03, 0.02, 0.2, 0.25],
                                    subdistribution=True)
        out = absorb(dist, 2, 10)
        self.assertTrue(np.all(out.weights >= 0.2))
        self.assertTrue(np.all(out.weights < 0.4))
        self.assertAlmostEqual(out.mass, dist.mass, delta=1e-14)
        # the residual lands in the bin of size exactly tau
        np.testing.assert_allclose(sorted(out.weights), [0.25, 0.3])
        self.assertTrue(out.subdistribution)

    def test_absorb_edge_cases(self):
        mid_only = make_distribution([0.25, 0.25, 0.25, 0.25])
        self.assertEqual(absorb(mid_only, 2, 10).weights.tolist(),
                         mid_only.weights.tolist())
        with self.assertRaises(NoMidBin):
            absorb(DiscreteDistribution([0.05, 0.03, 0.02],
                                        subdistribution=True), 2, 10)
        # a full distribution always ends up with mid-range bins
        out = absorb(make_family('uniform', 20), 2, 10)
        self.assertTrue(np.all(out.weights >= 0.2))
        self.assertAlmostEqual(out.mass, 1.0, delta=1e-14)
        with self.assertRaises(NotSplit):
            absorb(make_distribution([0.5, 0.5]), 2, 10)

    def test_split_then_absorb(self):
        generator = rng(5)
        checked = 0
        for _ in range(200):
            dist = random_distribution(generator, 6, concentration=0.5)
            n, theta = 20, 1.5
            try:
                out = absorb(split(dist, theta, n), theta, n)
            except NoMidBin:
                continue
            checked += 1
            tau = theta / n
            self.assertTrue(np.all(out.weights >= tau))
            self.assertTrue(np.all(out.weights < 2 * tau))
            self.assertAlmostEqual(out.mass, 1.0, delta=1e-14)
        self.assertGreater(checked, 100)

    def test_truncate_above(self):
        out = truncate_above(make_distribution([0.5, 0.3, 0.2]), 0.4)
        self.assertEqual(out.weights.tolist(), [0.3, 0.2])
        self.assertTrue(out.subdistribution)
        with self.assertRaises(NoMidBin):
            truncate_above(make_distribution([0.5, 0.5]), 0.1)

    def test_coarse_bin(self):
        dist = make_distribution([0.2, 0.3, 0.5])
        out = coarse_bin(dist, PartitionSpec(((0, 1), (2,))))
        np.testing.assert_allclose(out.weights, [0.5, 0.5])
        self.assertEqual(coarse_bin(dist, PartitionSpec.singletons(3)), dist)
        halves = coarse_bin(make_family('uniform', 10),
                            PartitionSpec((range(5), range(5, 10))))
        np.testing.assert_allclose(halves.weights, [0.5, 0.5])
        for groups in (((0, 1),), ((0, 1), (1, 2)), ((0, 1), (2, 3)),
                       ((0, 1), (), (2,))):
            with self.assertRaises(BadPartition):
                coarse_bin(dist, PartitionSpec(groups))

    def test_json(self):
        dist = make_distribution([0.1, 0.2, 0.7], labels=["x", "y", "z"])
        data = json.loads(dist.to_json())
        self.assertEqual(data["labels"], ["x", "y", "z"])
        self.assertEqual(DiscreteDistribution.from_dict(data), dist)
        # decimal strings are accepted too
        parsed = DiscreteDistribution.from_dict({"weights": ["0.25", "0.75"]})
        self.assertEqual(parsed.weights.tolist(), [0.25, 0.75])
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "dist.json"
            path.write_text(dist.to_json())
            self.assertEqual(load_distribution(path), dist)
            self.assertEqual(parse_spec(f"file:{path}"), dist)
            with self.assertRaises(UsageError):
                load_distribution(Path(tmp) / "missing.json")

    def test_parse_spec(self):
        self.assertEqual(parse_spec("uniform:N=4"), make_family('uniform', 4))
        self.assertEqual(parse_spec("zipf:N=3,s=1"),
                         make_family('zipf', 3, 1.0))
        self.assertEqual(parse_spec("geometric:N=5,r=0.5"),
                         make_family('geometric', 5, 0.5))
        self.assertEqual(parse_spec("spike:N=3,m=0.9"),
                         make_family('spike', 3, 0.9))
        for bad in ("uniform", "zipf:N=3", "foo:N=3", "uniform:N=x",
                    "uniform:N=3,s=2"):
            with self.assertRaises(UsageError):
                parse_spec(bad)
        with self.assertRaises(BadParam):
            parse_spec("zipf:N=3,s=-1")
