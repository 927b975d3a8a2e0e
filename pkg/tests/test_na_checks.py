# pylint: disable=c0111, c0103

import unittest

import numpy as np

from missingmass.distributions import (
    DiscreteDistribution, make_family, make_distribution)
from missingmass.na_checks import (
    occupancy_cov_exact, count_cov_exact, count_vectors,
    count_cov_enumerated, occupancy_cov_enumerated, na_monotone_test)
from missingmass.errors import (
    IndexOutOfRange, RequiresDistinct, OverlappingSets, UnknownFunction,
    SupportTooLarge, BadParam)

from .util import random_distributions


class Tests(unittest.TestCase):

    def test_count_cov_example(self):
        self.assertAlmostEqual(count_cov_exact(make_family('uniform', 3),
                                               4, 0, 1),
                               -4 / 9, places=15)

    def test_occupancy_cov_example(self):
        self.assertAlmostEqual(occupancy_cov_exact(make_family('uniform', 2),
                                                   1, 0, 1),
                               -0.25, places=15)
        # n = 0: nothing drawn, nothing correlated
        self.assertEqual(occupancy_cov_exact(make_family('uniform', 3),
                                             0, 0, 1), 0.0)

    def test_count_vectors(self):
        vectors = count_vectors(3, 2)
        self.assertEqual(vectors.shape, (6, 3))
        self.assertTrue(np.all(vectors.sum(axis=1) == 2))
        self.assertEqual(len({tuple(v) for v in vectors.tolist()}), 6)
        self.assertEqual(count_vectors(1, 5).tolist(), [[5]])
        with self.assertRaises(SupportTooLarge):
            count_vectors(20, 40)

    def test_enumeration_matches_closed_forms(self):
        uniform = make_family('uniform', 3)
        for n in range(2, 6):
            self.assertAlmostEqual(count_cov_enumerated(uniform, n, 0, 2),
                                   count_cov_exact(uniform, n, 0, 2),
                                   delta=1e-12)
        for dist in random_distributions(10, 2, 4, seed=41):
            for n in (1, 3, 6):
                self.assertAlmostEqual(occupancy_cov_enumerated(dist, n, 0, 1),
                                       occupancy_cov_exact(dist, n, 0, 1),
                                       delta=1e-12)
                self.assertAlmostEqual(count_cov_enumerated(dist, n, 0, 1),
                                       count_cov_exact(dist, n, 0, 1),
                                       delta=1e-12)
        self.assertEqual(count_cov_enumerated(uniform, 0, 0, 1), 0.0)

    def test_occupancy_never_positive(self):
        for dist in random_distributions(50, 2, 8, seed=42):
            for n in (1, 2, 5, 20, 100):
                for i in range(dist.size):
                    for j in range(i + 1, dist.size):
                        self.assertLessEqual(
                            occupancy_cov_exact(dist, n, i, j), 1e-15)

    def test_pair_errors(self):
        dist = make_family('uniform', 3)
        with self.assertRaises(IndexOutOfRange):
            occupancy_cov_exact(dist, 2, 0, 3)
        with self.assertRaises(IndexOutOfRange):
            count_cov_exact(dist, 2, -1, 0)
        with self.assertRaises(RequiresDistinct):
            count_cov_exact(dist, 2, 1, 1)
        for n in (-1, 2.5):
            with self.assertRaises(BadParam):
                occupancy_cov_exact(dist, n, 0, 1)
            with self.assertRaises(BadParam):
                count_cov_exact(dist, n, 0, 1)
            with self.assertRaises(BadParam):
                count_cov_enumerated(dist, n, 0, 1)

    def test_monotone_sum(self):
        report = na_monotone_test(make_family('uniform', 3), 4, [0], [1],
                                  trials=20_000, seed=7, chunk=5_000)
        self.assertAlmostEqual(report.exact_cov, -4 / 9, places=12)
        self.assertAlmostEqual(report.empirical_cov, -4 / 9, delta=0.05)
        self.assertLess(report.ci_low, report.ci_high)
        self.assertEqual(report.verdict, 'consistent')
        self.assertEqual(report.pair, (0, 1))
        self.assertEqual(report.to_dict()['pair'], [0, 1])

    def test_monotone_functions(self):
        zipf = make_family('zipf', 10, 1.0)
        for f, g in (('above', 'above'), ('max', 'sum'), ('sum', 'max')):
            report = na_monotone_test(zipf, 50, [0, 1, 2], [5, 6, 7, 8, 9],
                                      f, g, trials=10_000, seed=8)
            self.assertIsNone(report.exact_cov)
            self.assertIsNone(report.pair)
            self.assertEqual(report.verdict, 'consistent', report)
        report = na_monotone_test(zipf, 50, [0], [1], 'constant', 'sum',
                                  trials=1_000, seed=9)
        self.assertEqual(report.exact_cov, 0.0)
        self.assertEqual(report.empirical_cov, 0.0)
        self.assertEqual(report.verdict, 'consistent')

    def test_monotone_deterministic(self):
        dist = make_distribution([0.5, 0.3, 0.2])
        runs = [na_monotone_test(dist, 10, [0], [1, 2], trials=4_000, seed=3,
                                 chunk=1_000, jobs_window=window)
                for window in (1, 0)]
        self.assertEqual(runs[0], runs[1])

    def test_monotone_errors(self):
        dist = make_family('uniform', 4)
        with self.assertRaises(OverlappingSets):
            na_monotone_test(dist, 5, [0, 1], [1, 2], trials=10)
        with self.assertRaises(UnknownFunction):
            na_monotone_test(dist, 5, [0], [1], f='min', trials=10)
        with self.assertRaises(IndexOutOfRange):
            na_monotone_test(dist, 5, [0], [4], trials=10)
        with self.assertRaises(BadParam):
            na_monotone_test(dist, 5, [0], [1], trials=1)
        with self.assertRaises(BadParam):
            na_monotone_test(dist, -1, [0], [1], trials=10)
        with self.assertRaises(BadParam):
            na_monotone_test(DiscreteDistribution([0.3, 0.2],
                                                  subdistribution=True),
                             5, [0], [1], trials=10)
