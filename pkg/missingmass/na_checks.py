"""
Negative dependence among the bin counts ``C_i`` of a multinomial sample,
and among the occupancy indicators ``Y_i = 1{C_i = 0}``.

Exact covariances come in closed form, and are cross-checked against a
full enumeration of count vectors on tiny instances. For monotone functions
of counts on disjoint sets of bins, a Monte-Carlo test estimates the
covariance with a 99% confidence interval, and only flags a violation
when that interval lies entirely above zero.
"""

import itertools
import math
from dataclasses import dataclass, asdict

import numpy as np
from scipy import stats

from .errors import (
    IndexOutOfRange, RequiresDistinct, OverlappingSets, UnknownFunction,
    SupportTooLarge, BadParam)
from .sweep import (
    DEFAULT_CHUNK, default_seed, split_trials, spawn_generators, run_chunks)

CONFIDENCE = 0.99

ENUMERATION_LIMIT = 1_000_000
"""Largest number of count vectors :func:`count_vectors` agrees to list."""


def _check_index(dist, index):
    if not 0 <= index < dist.size:
        raise IndexOutOfRange("index {} outside 0..{}"
                              .format(index, dist.size - 1))


def _check_n(n):
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise BadParam("n must be a non-negative integer, got {!r}"
                       .format(n))


def _check_pair(dist, i, j):
    _check_index(dist, i)
    _check_index(dist, j)
    if i == j:
        raise RequiresDistinct("covariance of a bin with itself: {}"
                               .format(i))


def occupancy_cov_exact(dist, n, i, j):
    """
    ``Cov(Y_i, Y_j) = (1 - w_i - w_j)**n - (1 - w_i)**n (1 - w_j)**n``,
    never positive.
    """
    _check_pair(dist, i, j)
    _check_n(n)
    wi, wj = float(dist.weights[i]), float(dist.weights[j])
    both = max(1.0 - wi - wj, 0.0) ** n
    return both - (1.0 - wi) ** n * (1.0 - wj) ** n


def count_cov_exact(dist, n, i, j):
    """
    ``Cov(C_i, C_j) = -n w_i w_j``.
    """
    _check_pair(dist, i, j)
    _check_n(n)
    return -n * float(dist.weights[i]) * float(dist.weights[j])


def count_vectors(size, n):
    """
    All vectors of ``size`` non-negative integers summing to ``n``.

    Returns:
      numpy.ndarray: of shape ``(C(n + size - 1, size - 1), size)``

    Raises:
      SupportTooLarge: beyond :data:`ENUMERATION_LIMIT` vectors
    """
    count = math.comb(n + size - 1, size - 1)
    if count > ENUMERATION_LIMIT:
        raise SupportTooLarge("{} count vectors to enumerate".format(count))
    vectors = []
    # stars and bars: choose the positions of the size-1 separators
    for bars in itertools.combinations(range(n + size - 1), size - 1):
        edges = (-1,) + bars + (n + size - 1,)
        vectors.append([edges[k + 1] - edges[k] - 1 for k in range(size)])
    return np.array(vectors, dtype=np.int64).reshape(-1, size)


def _enumerated_cov(dist, n, i, j, transform):
    _check_pair(dist, i, j)
    _check_n(n)
    if n == 0:
        return 0.0
    counts = count_vectors(dist.size, n)
    pmf = stats.multinomial.pmf(counts, n, dist.weights)
    xi = transform(counts[:, i])
    xj = transform(counts[:, j])
    return float(np.dot(pmf, xi * xj)
                 - np.dot(pmf, xi) * np.dot(pmf, xj))


def count_cov_enumerated(dist, n, i, j):
    """
    ``Cov(C_i, C_j)`` by summing over every possible count vector.
    """
    return _enumerated_cov(dist, n, i, j, lambda c: c.astype(np.float64))


def occupancy_cov_enumerated(dist, n, i, j):
    """
    ``Cov(Y_i, Y_j)`` by summing over every possible count vector.
    """
    return _enumerated_cov(dist, n, i, j, lambda c: (c == 0).astype(float))


def _sum(counts, _n, _mass):
    return counts.sum(axis=1).astype(np.float64)


def _max(counts, _n, _mass):
    if counts.shape[1] == 0:
        return np.zeros(counts.shape[0])
    return counts.max(axis=1).astype(np.float64)


def _above(counts, n, mass):
    return (counts.sum(axis=1) > n * mass).astype(np.float64)


def _constant(counts, _n, _mass):
    return np.zeros(counts.shape[0])


FUNCTIONS = {
    'sum': _sum,
    'max': _max,
    'above': _above,
    'constant': _constant,
}
"""Coordinate-wise non-decreasing functions of a set of counts; ``above``
is the indicator that the set's total exceeds its expectation."""


@dataclass(frozen=True)
class NAReport:                                         # pylint: disable=r0902
    """
    Outcome of :func:`na_monotone_test`.

    ``verdict`` is ``violation`` only when the whole confidence interval
    lies strictly above 0.
    """

    set_a: tuple
    set_b: tuple
    f: str
    g: str
    n: int
    trials: int
    exact_cov: float | None
    empirical_cov: float
    ci_low: float
    ci_high: float
    verdict: str

    @property
    def pair(self):
        """
        Returns:
          tuple: ``(i, j)`` when both sets are singletons, else None
        """
        if len(self.set_a) == 1 and len(self.set_b) == 1:
            return self.set_a[0], self.set_b[0]
        return None

    def to_dict(self):                                  # pylint: disable=c0116
        result = asdict(self)
        result['set_a'] = list(self.set_a)
        result['set_b'] = list(self.set_b)
        result['pair'] = None if self.pair is None else list(self.pair)
        return result


def _evaluate_chunk(weights, n, set_a, set_b, f, g,            # pylint: disable=r0913
                    size, rng):
    counts = rng.multinomial(n, weights, size=size)
    mass_a = float(np.sum(weights[list(set_a)]))
    mass_b = float(np.sum(weights[list(set_b)]))
    values_a = FUNCTIONS[f](counts[:, list(set_a)], n, mass_a)
    values_b = FUNCTIONS[g](counts[:, list(set_b)], n, mass_b)
    return values_a, values_b


def na_monotone_test(dist, n, set_a, set_b, f='sum', g='sum',  # pylint: disable=r0913, r0914
                     trials=100_000, seed=None, *, chunk=DEFAULT_CHUNK,
                     jobs_window=None, verbose=False):
    """
    Monte-Carlo estimate of ``Cov(f(C_A), g(C_B))`` for disjoint bin
    sets ``A`` and ``B``.

    The confidence interval is the normal approximation built on the
    empirical variance of the centered products.

    Parameters:
      f, g: names in :data:`FUNCTIONS`

    Returns:
      NAReport: ``exact_cov`` is filled when it is known in closed form,
      i.e. when both functions are ``sum``, or one is ``constant``

    Raises:
      OverlappingSets: if ``A`` and ``B`` share a bin
      UnknownFunction: if ``f`` or ``g`` is not in the catalog
      BadParam: on a negative ``n``, or fewer than 2 trials
    """
    _check_n(n)
    set_a = tuple(int(i) for i in set_a)
    set_b = tuple(int(i) for i in set_b)
    for index in set_a + set_b:
        _check_index(dist, index)
    if set(set_a) & set(set_b):
        raise OverlappingSets("sets share bins {}".format(
            sorted(set(set_a) & set(set_b))))
    for name in (f, g):
        if name not in FUNCTIONS:
            raise UnknownFunction("unknown function {!r}, expected one of {}"
                                  .format(name, ", ".join(FUNCTIONS)))
    if trials < 2:
        raise BadParam("trials must be >= 2, got {!r}".format(trials))
    if dist.subdistribution:
        raise BadParam("multinomial sampling needs a full distribution")

    seed = default_seed() if seed is None else seed
    sizes = split_trials(trials, chunk)
    payloads = [(dist.weights, n, set_a, set_b, f, g, size, rng)
                for size, rng in zip(sizes, spawn_generators(seed, len(sizes)))]
    chunks = run_chunks(_evaluate_chunk, payloads, jobs_window=jobs_window,
                        verbose=verbose, label="counts")
    values_a = np.concatenate([a for a, _ in chunks])
    values_b = np.concatenate([b for _, b in chunks])

    products = (values_a - values_a.mean()) * (values_b - values_b.mean())
    covariance = float(products.mean())
    quantile = stats.norm.ppf(1 - (1 - CONFIDENCE) / 2)
    half_width = float(quantile * products.std(ddof=1) / math.sqrt(trials))

    exact = None
    if 'constant' in (f, g):
        exact = 0.0
    elif f == g == 'sum':
        exact = -n * float(np.sum(dist.weights[list(set_a)])) \
            * float(np.sum(dist.weights[list(set_b)]))
    low, high = covariance - half_width, covariance + half_width
    return NAReport(
        set_a=set_a, set_b=set_b, f=f, g=g, n=n, trials=trials,
        exact_cov=exact, empirical_cov=covariance, ci_low=low, ci_high=high,
        verdict='violation' if low > 0 else 'consistent')
