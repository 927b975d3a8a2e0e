# pylint: disable=c0111, c0103

import math
import unittest

import numpy as np

from missingmass.distributions import (
    DiscreteDistribution, make_distribution, make_family, split, absorb)
from missingmass.missing_mass import (
    missing_mass_stats, expected_missing_mass, exact_distribution, law_mean,
    tail_probability, exact_deviation_prob, sample_missing_mass,
    sample_missing_masses, mc_deviation_prob, clopper_pearson,
    split_condition_margins, compensation_gap, AliasTable)
from missingmass.bounds import theta_star
from missingmass.errors import SupportTooLarge, BadParam, NoMidBin

from .util import rng, random_distribution, random_distributions


class Tests(unittest.TestCase):

    def test_stats_example(self):
        stats = missing_mass_stats(make_family('uniform', 2), 1)
        self.assertAlmostEqual(stats.mean, 0.5, places=15)
        self.assertAlmostEqual(stats.variance_proxy, 0.125, places=15)
        self.assertAlmostEqual(stats.weighted_variance, 0.25, places=15)
        self.assertEqual(stats.n, 1)
        self.assertEqual(expected_missing_mass(make_family('uniform', 5), 0),
                         1.0)
        for n in (-1, 2.5):
            with self.assertRaises(BadParam):
                missing_mass_stats(make_family('uniform', 2), n)

    def test_mean_decreases_with_n(self):
        for dist in random_distributions(20, 2, 10):
            means = [expected_missing_mass(dist, n) for n in range(60)]
            self.assertTrue(all(a >= b for a, b in zip(means, means[1:])))

    def test_exact_law_examples(self):
        law = exact_distribution(make_family('uniform', 2), 2)
        self.assertEqual(list(law), [0.0, 0.5])
        self.assertAlmostEqual(law[0.0], 0.5, places=14)
        self.assertAlmostEqual(law[0.5], 0.5, places=14)
        self.assertEqual(exact_distribution(make_distribution([1.0]), 3),
                         {0.0: 1.0})
        self.assertEqual(exact_distribution(make_distribution([1.0]), 0),
                         {1.0: 1.0})

    def test_exact_law_subdistribution(self):
        # the implicit bin carries 0.5
        dist = DiscreteDistribution([0.3, 0.2], subdistribution=True)
        law = exact_distribution(dist, 1)
        np.testing.assert_allclose(list(law), [0.2, 0.3, 0.5])
        np.testing.assert_allclose(list(law.values()), [0.3, 0.2, 0.5],
                                   atol=1e-14)

    def test_exact_law_matches_moments(self):
        for dist in random_distributions(30, 2, 8):
            for n in (1, 3, 10, 40):
                for independent in (False, True):
                    law = exact_distribution(dist, n, independent)
                    self.assertAlmostEqual(math.fsum(law.values()), 1.0,
                                           delta=1e-10)
                    self.assertAlmostEqual(law_mean(law),
                                           expected_missing_mass(dist, n),
                                           delta=1e-10)
                    masses = list(law)
                    self.assertEqual(masses, sorted(masses))

    def test_exact_too_large(self):
        with self.assertRaises(SupportTooLarge):
            exact_distribution(make_family('uniform', 21), 5)

    def test_exact_deviation_examples(self):
        dist = make_family('uniform', 2)
        upper = exact_deviation_prob(dist, 2, 0.25, 'upper')
        lower = exact_deviation_prob(dist, 2, 0.25, 'lower')
        self.assertAlmostEqual(upper.estimate, 0.5, places=14)
        self.assertAlmostEqual(lower.estimate, 0.5, places=14)
        self.assertIsNone(upper.trials)
        self.assertEqual(upper.ci_width, 0.0)
        self.assertEqual(upper.method, 'exact')
        with self.assertRaises(BadParam):
            exact_deviation_prob(dist, 2, 0.25, 'sideways')
        with self.assertRaises(BadParam):
            exact_deviation_prob(dist, 2, 1.5, 'upper')

    def test_alias_table(self):
        weights = np.array([0.5, 0.25, 0.125, 0.125])
        draws = AliasTable(weights).draw(rng(3), 200_000)
        frequencies = np.bincount(draws, minlength=4) / draws.size
        np.testing.assert_allclose(frequencies, weights, atol=5e-3)

    def test_sample_missing_mass(self):
        dist = make_family('zipf', 8, 1.0)
        first = sample_missing_mass(dist, 10, seed=12)
        self.assertEqual(first, sample_missing_mass(dist, 10, seed=12))
        self.assertGreaterEqual(first, 0.0)
        self.assertLessEqual(first, 1.0)
        self.assertAlmostEqual(sample_missing_mass(dist, 0, seed=1), 1.0,
                               places=14)
        values = sample_missing_masses(dist, 10, 50_000, rng(4))
        self.assertAlmostEqual(values.mean(), expected_missing_mass(dist, 10),
                               delta=5e-3)
        independent = sample_missing_masses(dist, 10, 50_000, rng(4),
                                            independent=True)
        self.assertAlmostEqual(independent.mean(),
                               expected_missing_mass(dist, 10), delta=5e-3)

    def test_sample_subdistribution(self):
        dist = DiscreteDistribution([0.3, 0.2], subdistribution=True)
        values = sample_missing_masses(dist, 1, 20_000, rng(8))
        atoms = np.array([0.2, 0.3, 0.5])
        self.assertTrue(np.all(
            np.isclose(values[:, None], atoms).any(axis=1)))
        self.assertAlmostEqual(values.mean(), law_mean(
            exact_distribution(dist, 1)), delta=1e-2)

    def test_clopper_pearson(self):
        for trials in (1, 10, 1000):
            low, high = clopper_pearson(0, trials)
            self.assertEqual(low, 0.0)
            self.assertAlmostEqual(high, 1 - 0.005 ** (1 / trials),
                                   places=10)
            low, high = clopper_pearson(trials, trials)
            self.assertEqual(high, 1.0)
            self.assertAlmostEqual(low, 0.005 ** (1 / trials), places=10)
        low, high = clopper_pearson(50, 100)
        self.assertLess(low, 0.5)
        self.assertGreater(high, 0.5)

    def test_mc_single_trial(self):
        estimate = mc_deviation_prob(make_family('uniform', 4), 4, 0.1,
                                     'upper', trials=1, seed=5)
        self.assertIn(estimate.estimate, (0.0, 1.0))
        self.assertEqual(estimate.trials, 1)
        with self.assertRaises(BadParam):
            mc_deviation_prob(make_family('uniform', 4), 4, 0.1, 'upper',
                              trials=0)

    def test_mc_agrees_with_exact(self):
        dist = make_family('zipf', 6, 1.0)
        for side in ('upper', 'lower'):
            exact = exact_deviation_prob(dist, 8, 0.05, side).estimate
            trials = 40_000
            mc = mc_deviation_prob(dist, 8, 0.05, side, trials, seed=99,
                                   chunk=10_000)
            sigma = math.sqrt(exact * (1 - exact) / trials)
            self.assertLess(abs(mc.estimate - exact), 5 * sigma + 1e-3)
            self.assertLessEqual(mc.ci_low, mc.estimate)
            self.assertGreaterEqual(mc.ci_high, mc.estimate)

    def test_mc_deterministic(self):
        dist = make_family('geometric', 6, 0.6)
        runs = [mc_deviation_prob(dist, 10, 0.05, 'upper', 3000, seed=17,
                                  chunk=1000, jobs_window=window)
                for window in (1, 0)]
        self.assertEqual(runs[0], runs[1])

    def test_split_condition(self):
        generator = rng(21)
        for _ in range(200):
            dist = random_distribution(generator, int(generator.integers(1, 7)),
                                       concentration=0.4)
            n = int(generator.integers(2, 300))
            theta = float(generator.uniform(0.5, min(n - 0.5, 8)))
            for margin in split_condition_margins(dist, theta, n):
                self.assertGreaterEqual(margin, -1e-14)

    def test_compensation_gap(self):
        generator = rng(22)
        for epsilon in (0.05, 0.1, 0.3):
            theta = theta_star(epsilon)
            for _ in range(50):
                dist = random_distribution(
                    generator, int(generator.integers(1, 8)), 0.5)
                n = int(generator.integers(math.ceil(theta) + 1, 400))
                gap = compensation_gap(dist, theta, n)
                self.assertGreaterEqual(gap, -1e-15)
                self.assertLessEqual(gap, math.exp(-theta) + 1e-15)

    def test_split_dominates_independent(self):
        generator = rng(23)
        for _ in range(40):
            dist = random_distribution(generator, 3, 0.5)
            theta, n = 1.5, 8
            fine = split(dist, theta, n)
            if fine.size > 12:
                continue
            before = exact_distribution(dist, n, independent=True)
            after = exact_distribution(fine, n, independent=True)
            for threshold in before:
                self.assertGreaterEqual(
                    tail_probability(after, threshold - 1e-12),
                    tail_probability(before, threshold - 1e-12) - 1e-12)

    def test_variance_proxy_after_transform(self):
        generator = rng(24)
        theta, n = 2.0, 20
        checked = 0
        for _ in range(100):
            dist = random_distribution(generator, 6, 0.5)
            try:
                out = absorb(split(dist, theta, n), theta, n)
            except NoMidBin:
                continue
            checked += 1
            proxy = missing_mass_stats(out, n).variance_proxy
            self.assertLessEqual(proxy,
                                 theta / n * math.exp(-theta) + 1e-12)
        self.assertGreater(checked, 50)
