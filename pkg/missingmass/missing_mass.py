"""
The missing mass ``Y = sum_i w_i Y_i`` of an i.i.d. sample of size ``n``,
where ``Y_i`` is the indicator that bin ``i`` was never drawn.

This module computes its moments in closed form, its full law on small
supports by inclusion-exclusion over subsets, and Monte-Carlo estimates
of its deviation probabilities.

Sampling uses Vose's alias method on top of ``numpy.random.PCG64``
generators; see :mod:`missingmass.sweep` for how streams are attached
to chunks of trials.
"""

import math
from dataclasses import dataclass, asdict

import numpy as np
from scipy import stats

from .errors import SupportTooLarge, BadParam
from .distributions import split, split_pieces
from .sweep import (
    DEFAULT_CHUNK, default_seed, split_trials, spawn_generators, run_chunks)

EXACT_SUPPORT_LIMIT = 20
"""The exact law costs ``2**N * N``; larger supports are refused."""

CONFIDENCE = 0.99
"""Level of the two-sided Clopper-Pearson intervals."""

MERGE_TOLERANCE = 1e-12
NOISE_FLOOR = 1e-15
DEVIATION_SLACK = 1e-12

SIDES = ('upper', 'lower')


@dataclass(frozen=True)
class MissingMassStats:
    """
    Closed-form moments of the missing mass at sample size ``n``.

    Attributes:
      mean: ``E[Y] = sum_i w_i q_i`` with ``q_i = (1 - w_i)**n``
      variance_proxy: ``sum_i w_i**2 q_i (1 - q_i)``
      weighted_variance: ``sum_i w_i q_i (1 - q_i)``
      n: the sample size
    """

    mean: float
    variance_proxy: float
    weighted_variance: float
    n: int

    def to_dict(self):                                  # pylint: disable=c0116
        return asdict(self)


@dataclass(frozen=True)
class DeviationEstimate:
    """
    A deviation probability ``P(Y - E[Y] >= eps)`` (side ``upper``) or
    ``P(E[Y] - Y >= eps)`` (side ``lower``).

    For the ``exact`` method, ``ci_low == estimate == ci_high``
    and ``trials`` is None.
    """

    estimate: float
    ci_low: float
    ci_high: float
    trials: int | None
    method: str
    side: str
    epsilon: float
    n: int
    confidence: float = CONFIDENCE

    @property
    def ci_width(self):                                 # pylint: disable=c0116
        return self.ci_high - self.ci_low

    def to_dict(self):                                  # pylint: disable=c0116
        return asdict(self)


def _check_n(n):
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise BadParam("sample size must be a non-negative integer, got {!r}"
                       .format(n))
    return int(n)


def _check_side(side):
    if side not in SIDES:
        raise BadParam("side must be one of {}, got {!r}"
                       .format(", ".join(SIDES), side))
    return side


def unseen_probabilities(dist, n):
    """
    Returns:
      numpy.ndarray: ``q_i = (1 - w_i)**n``, computed as
      ``exp(n log1p(-w_i))``.
    """
    n = _check_n(n)
    if n == 0:
        return np.ones(dist.size)
    with np.errstate(divide='ignore'):
        return np.exp(n * np.log1p(-dist.weights))


def expected_missing_mass(dist, n):
    """
    ``E[Y] = sum_i w_i (1 - w_i)**n``; equals the total mass at ``n = 0``.
    """
    return float(np.dot(dist.weights, unseen_probabilities(dist, n)))


def missing_mass_stats(dist, n):
    """
    Returns:
      MissingMassStats: mean, variance proxy and weighted variance
    """
    n = _check_n(n)
    weights = dist.weights
    q = unseen_probabilities(dist, n)
    var = q * (1.0 - q)
    return MissingMassStats(
        mean=float(np.dot(weights, q)),
        variance_proxy=float(np.dot(weights * weights, var)),
        weighted_variance=float(np.dot(weights, var)),
        n=n)


def _subset_masses(weights):
    # index s has bit k set iff bin k belongs to the subset
    masses = np.zeros(1)
    for weight in weights:
        masses = np.concatenate((masses, masses + weight))
    return masses


def _superset_mobius(values, size):
    # P(missing = S) = sum_{T >= S} (-1)**|T - S| P(missing >= T)
    cube = values.reshape((2,) * size)
    for axis in range(size):
        low = [slice(None)] * size
        high = [slice(None)] * size
        low[axis], high[axis] = 0, 1
        cube[tuple(low)] -= cube[tuple(high)]
    return cube.reshape(-1)


def _independent_law(q):
    probs = np.ones(1)
    for qi in q:
        probs = np.concatenate((probs * (1.0 - qi), probs * qi))
    return probs


def _aggregate(masses, probs):
    order = np.argsort(masses, kind='stable')
    law = {}
    key = None
    for mass, prob in zip(masses[order], probs[order]):
        if key is None or mass - key > MERGE_TOLERANCE:
            key = float(mass)
            law[key] = 0.0
        law[key] += float(prob)
    return {mass: prob for mass, prob in law.items() if prob > NOISE_FLOOR}


def exact_distribution(dist, n, independent=False):
    """
    The law of the missing mass, as a dict ``{mass: probability}`` sorted
    by increasing mass.

    The probability that the set of unseen bins is exactly ``S`` is
    obtained from ``P(unseen set contains T) = (1 - w(T))**n`` by a Möbius
    transform over supersets; subsets with masses within ``1e-12`` of one
    another are merged.

    With ``independent=True`` the indicators ``Y_i`` are taken
    independent with the same marginals, which yields the law of the
    surrogate variable instead.

    Raises:
      SupportTooLarge: if the support has more than
        :data:`EXACT_SUPPORT_LIMIT` bins
    """
    n = _check_n(n)
    size = dist.size
    if size > EXACT_SUPPORT_LIMIT:
        raise SupportTooLarge("exact law needs N <= {}, got N = {}"
                              .format(EXACT_SUPPORT_LIMIT, size))
    masses = _subset_masses(dist.weights)
    if independent:
        probs = _independent_law(unseen_probabilities(dist, n))
    else:
        # a sub-distribution leaves its missing mass to an implicit bin
        avoid = np.clip(1.0 - masses, 0.0, 1.0)
        probs = _superset_mobius(avoid ** n, size)
        probs = np.clip(probs, 0.0, None)
    return _aggregate(masses, probs)


def law_mean(law):
    """
    Returns:
      float: the mean of a law as returned by :func:`exact_distribution`.
    """
    return math.fsum(mass * prob for mass, prob in law.items())


def tail_probability(law, threshold):
    """
    Returns:
      float: ``P(Y >= threshold)`` under an exact law.
    """
    return math.fsum(prob for mass, prob in law.items() if mass >= threshold)


def _deviation_event(mean, epsilon, side):
    """
    Returns a vectorized predicate on missing-mass values.
    """
    if side == 'upper':
        threshold = mean + epsilon - DEVIATION_SLACK
        return lambda values: values >= threshold
    threshold = mean - epsilon + DEVIATION_SLACK
    return lambda values: values <= threshold


def _check_epsilon(epsilon):
    if not 0 < epsilon < 1:
        raise BadParam("epsilon must lie in (0, 1), got {!r}".format(epsilon))


def exact_deviation_prob(dist, n, epsilon, side, independent=False):
    """
    The exact probability of a deviation of size ``epsilon`` on one side,
    from :func:`exact_distribution`.

    Returns:
      DeviationEstimate: with method ``exact``

    Raises:
      SupportTooLarge: like :func:`exact_distribution`
    """
    _check_epsilon(epsilon)
    _check_side(side)
    law = exact_distribution(dist, n, independent=independent)
    event = _deviation_event(expected_missing_mass(dist, n), epsilon, side)
    masses = np.fromiter(law.keys(), dtype=np.float64, count=len(law))
    probs = np.fromiter(law.values(), dtype=np.float64, count=len(law))
    estimate = min(math.fsum(probs[event(masses)]), 1.0)
    return DeviationEstimate(
        estimate=estimate, ci_low=estimate, ci_high=estimate, trials=None,
        method='exact', side=side, epsilon=epsilon, n=int(n))


class AliasTable:
    """
    Vose's alias method: O(N) set-up, then each draw costs one integer
    and one uniform.
    """

    def __init__(self, weights):
        weights = np.asarray(weights, dtype=np.float64)
        size = weights.size
        scaled = weights * size / weights.sum()
        self.prob = np.ones(size)
        self.alias = np.arange(size)
        small = [i for i in range(size) if scaled[i] < 1.0]
        large = [i for i in range(size) if scaled[i] >= 1.0]
        while small and large:
            less, more = small.pop(), large.pop()
            self.prob[less] = scaled[less]
            self.alias[less] = more
            scaled[more] = scaled[more] + scaled[less] - 1.0
            (small if scaled[more] < 1.0 else large).append(more)
        # leftovers are 1 up to rounding

    def draw(self, rng, shape):
        """
        Returns:
          numpy.ndarray: bin indices of the given shape
        """
        column = rng.integers(0, self.prob.size, size=shape)
        coin = rng.random(size=shape)
        return np.where(coin < self.prob[column], column, self.alias[column])


def sample_missing_masses(dist, n, trials, rng, independent=False):
    """
    Draw ``trials`` independent realizations of the missing mass.

    Each trial draws ``n`` outcomes with an :class:`AliasTable` and
    sums the weights of the bins that were not drawn. With
    ``independent=True``, each bin is instead left unseen independently
    with probability ``(1 - w_i)**n``.

    Returns:
      numpy.ndarray: ``trials`` values in ``[0, 1]``
    """
    n = _check_n(n)
    weights = dist.weights
    if independent:
        unseen = rng.random((trials, dist.size)) \
            < unseen_probabilities(dist, n)
    else:
        table = weights
        if dist.subdistribution and dist.mass < 1.0:
            # the mass left out goes to one extra, never counted, bin
            table = np.append(weights, 1.0 - dist.mass)
        seen = np.zeros((trials, table.size), dtype=bool)
        if n:
            draws = AliasTable(table).draw(rng, (trials, n))
            seen[np.arange(trials)[:, None], draws] = True
        unseen = ~seen[:, :dist.size]
    return np.clip(unseen @ weights, 0.0, 1.0)


def sample_missing_mass(dist, n, rng=None, *, seed=None, independent=False):
    """
    Draw one realization of the missing mass.

    Parameters:
      rng: a ``numpy.random.Generator``; if not provided, one is
        built from ``seed``, itself defaulting to :func:`default_seed`.
    """
    if rng is None:
        rng = np.random.Generator(np.random.PCG64(
            default_seed() if seed is None else seed))
    return float(sample_missing_masses(dist, n, 1, rng, independent)[0])


def clopper_pearson(successes, trials, confidence=CONFIDENCE):
    """
    Exact two-sided binomial confidence interval.

    Returns:
      tuple: ``(low, high)``; at 0 successes ``high`` is
      ``1 - ((1 - confidence)/2)**(1/trials)``.
    """
    alpha = 1.0 - confidence
    low = 0.0 if successes == 0 else \
        float(stats.beta.ppf(alpha / 2, successes, trials - successes + 1))
    high = 1.0 if successes == trials else \
        float(stats.beta.ppf(1 - alpha / 2, successes + 1, trials - successes))
    return low, high


def _count_deviations(dist, n, mean, epsilon, side,           # pylint: disable=r0913
                      size, rng, independent):
    values = sample_missing_masses(dist, n, size, rng, independent)
    return int(np.count_nonzero(_deviation_event(mean, epsilon, side)(values)))


def mc_deviation_prob(dist, n, epsilon, side, trials, seed=None, *,  # pylint: disable=r0913
                      chunk=DEFAULT_CHUNK, jobs_window=None,
                      independent=False, verbose=False):
    """
    Monte-Carlo estimate of a deviation probability.

    Trials are cut in chunks of ``chunk``, each chunk running as a
    :class:`~missingmass.job.ComputeJob` with its own stream; at most
    ``jobs_window`` chunks run at the same time.

    Returns:
      DeviationEstimate: with method ``monte_carlo`` and a
      99% Clopper-Pearson interval
    """
    _check_epsilon(epsilon)
    _check_side(side)
    n = _check_n(n)
    if trials < 1:
        raise BadParam("trials must be >= 1, got {!r}".format(trials))
    seed = default_seed() if seed is None else seed
    mean = expected_missing_mass(dist, n)
    sizes = split_trials(trials, chunk)
    generators = spawn_generators(seed, len(sizes))
    payloads = [(dist, n, mean, epsilon, side, size, rng, independent)
                for size, rng in zip(sizes, generators)]
    counts = run_chunks(_count_deviations, payloads, jobs_window=jobs_window,
                        verbose=verbose, label="deviations")
    successes = sum(counts)
    low, high = clopper_pearson(successes, trials)
    return DeviationEstimate(
        estimate=successes / trials, ci_low=low, ci_high=high,
        trials=trials, method='monte_carlo', side=side,
        epsilon=epsilon, n=n)


def split_condition_margin(weight, pieces, n):
    """
    ``prod_j (1 - w_j)**n - (1 - w)**n`` for a bin ``w`` split into
    ``pieces``; never negative since ``prod_j (1 - w_j) >= 1 - sum_j w_j``.
    """
    pieces = np.asarray(pieces, dtype=np.float64)
    with np.errstate(divide='ignore'):
        split_side = math.exp(n * float(np.sum(np.log1p(-pieces))))
        whole = math.exp(n * math.log1p(-weight)) if weight < 1 else 0.0
    return split_side - whole


def split_condition_margins(dist, theta, n):
    """
    Returns:
      list[float]: :func:`split_condition_margin` for each bin of ``dist``
      that :func:`~missingmass.distributions.split` actually cuts.
    """
    tau = theta / n
    margins = []
    for weight in dist.weights:
        pieces = split_pieces(float(weight), tau)
        if len(pieces) > 1:
            margins.append(split_condition_margin(float(weight), pieces, n))
    return margins


def compensation_gap(dist, theta, n):
    """
    ``E[Y'] - E[Y]`` where ``Y'`` is the missing mass of the split
    distribution; it lies in ``[0, exp(-theta)]``.
    """
    return (expected_missing_mass(split(dist, theta, n), n)
            - expected_missing_mass(dist, n))
