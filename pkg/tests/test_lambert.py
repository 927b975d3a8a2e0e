# pylint: disable=c0111, c0103

import math
import unittest

import numpy as np
from scipy import special

from missingmass.lambert import lambert_w_minus1, BRANCH_POINT
from missingmass.errors import LambertDomainError, DomainError


class Tests(unittest.TestCase):

    def test_branch_point(self):
        result = lambert_w_minus1(-1 / math.e)
        self.assertEqual(result.value, -1.0)
        self.assertEqual(lambert_w_minus1(BRANCH_POINT).value, -1.0)
        self.assertEqual(lambert_w_minus1(BRANCH_POINT + 1e-13).value, -1.0)

    def test_known_values(self):
        self.assertAlmostEqual(lambert_w_minus1(-2 * math.exp(-2)).value,
                               -2.0, places=12)
        self.assertAlmostEqual(lambert_w_minus1(-0.1).value, -3.577152,
                               places=6)

    def test_round_trip(self):
        grid = np.linspace(-50, -1, 10_000)
        for w in grid:
            result = lambert_w_minus1(w * math.exp(w))
            self.assertLess(abs(result.value - w) / abs(w), 1e-10, w)

    def test_residual_and_branch(self):
        for x in np.linspace(BRANCH_POINT, -1e-12, 997)[1:]:
            result = lambert_w_minus1(x)
            self.assertLessEqual(result.value, -1.0)
            self.assertLessEqual(result.residual, 1e-12 * max(1, abs(x)))
            self.assertLessEqual(result.iterations, 50)

    def test_matches_scipy(self):
        for x in (-0.36, -0.3, -0.2, -0.05, -1e-3, -1e-8):
            expected = special.lambertw(x, k=-1).real
            self.assertAlmostEqual(lambert_w_minus1(x).value, expected,
                                   delta=1e-12 * abs(expected))

    def test_stops_at_rounding_noise(self):
        for offset in (1e-8, 1e-9, 1e-10):
            x = BRANCH_POINT + offset
            result = lambert_w_minus1(x)
            self.assertLess(result.iterations, 10, offset)
            expected = special.lambertw(x, k=-1).real
            self.assertAlmostEqual(result.value, expected, delta=1e-7)

    def test_monotone(self):
        xs = np.linspace(BRANCH_POINT, -1e-6, 500)[1:]
        values = [lambert_w_minus1(x).value for x in xs]
        self.assertTrue(all(a > b for a, b in zip(values, values[1:])))

    def test_domain(self):
        for x in (0.0, 0.1, -0.4, -1.0, math.nan, -math.inf):
            with self.assertRaises(LambertDomainError):
                lambert_w_minus1(x)
        # also a DomainError, and a ValueError
        with self.assertRaises(DomainError):
            lambert_w_minus1(1)
        with self.assertRaises(ValueError):
            lambert_w_minus1(1)
