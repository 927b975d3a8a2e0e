"""
Deviation bounds for the missing mass.

For ``0 < eps < 1``, with ``gamma_eps = -2 W_{-1}(-eps / (2 sqrt(e)))``
and ``c(eps) = 3 (gamma_eps - 1) / (5 gamma_eps**2)``, and for any sample
size ``n >= ceil(gamma_eps) - 1``::

    P(Y - E[Y] >= eps) <= exp(-c(eps) n eps)
    P(E[Y] - Y >= eps) <= exp(-c(eps) n eps)

The module also exposes the generic exponent ``c(gamma, eps)`` that
``gamma_eps`` maximizes, a numeric optimizer used as a cross-check,
Bernstein's inequality, and the comparison with bounds of the form
``exp(-a n eps**2)``.

All bounds are computed as logarithms; probabilities are only
materialized in :class:`BoundResult`.
"""

import math
from dataclasses import dataclass, asdict

import numpy as np
from scipy import optimize

from .errors import (
    EpsilonOutOfRange, GammaOutOfDomain, NegativeVariance, NoCrossover,
    ThetaOutOfRange, BadParam)
from .lambert import lambert_w_minus1

SQRT_E = math.sqrt(math.e)

GAMMA_UPPER = 200.0
"""Upper end of the search bracket for gamma."""

ROOT_TOLERANCE = 1e-10

SMALLEST_BOUND = float(np.finfo(float).tiny)
"""Floor for :attr:`BoundResult.bound`; ``log_bound`` keeps the exact value."""

SIDES = ('upper', 'lower', 'two_sided')

CSV_COLUMNS = ('epsilon', 'n', 'gamma', 'c', 'exponent', 'bound',
               'n_min', 'side')


@dataclass(frozen=True)
class BoundResult:                                      # pylint: disable=r0902
    """
    One evaluation of the missing-mass bound.

    ``domain_ok`` tells whether ``n >= n_min``; the bound is still
    computed otherwise, but carries no guarantee.
    ``bound`` never underflows below :data:`SMALLEST_BOUND`; use
    ``log_bound`` for very large exponents.
    """

    epsilon: float
    n: int
    gamma: float
    c: float
    exponent: float
    log_bound: float
    bound: float
    n_min: int
    domain_ok: bool
    side: str

    def to_dict(self):                                  # pylint: disable=c0116
        return asdict(self)

    def csv_row(self):
        """
        Returns:
          list: the values of :data:`CSV_COLUMNS`, in that order
        """
        return [getattr(self, column) for column in CSV_COLUMNS]


@dataclass(frozen=True)
class ComparatorSpec:
    """
    A competing bound of the form ``exp(-a n eps**2)``.

    The coefficients are configuration: the defaults below reproduce
    the crossovers reported against the sharpest known bounds of that
    family, and should be checked against their original source.
    """

    coefficient: float
    side: str = 'upper'
    source_label: str = ""
    exponent_power: int = 2

    def __post_init__(self):
        if not self.coefficient > 0:
            raise BadParam("comparator coefficient must be > 0, got {!r}"
                           .format(self.coefficient))
        if self.exponent_power != 2:
            raise BadParam("only exp(-a n eps**2) comparators are supported")

    def to_dict(self):                                  # pylint: disable=c0116
        return asdict(self)


UPPER_COMPARATOR = ComparatorSpec(
    1.0, 'upper', "Berend-Kontorovich, upper deviation")
LOWER_COMPARATOR = ComparatorSpec(
    1.89, 'lower', "Berend-Kontorovich, lower deviation")


def _check_epsilon(epsilon):
    if not 0 < epsilon < 1:
        raise EpsilonOutOfRange(
            "epsilon must lie in (0, 1), got {!r}".format(epsilon))


def gamma_eps(epsilon):
    """
    The optimal ``gamma``: ``-2 W_{-1}(-eps / (2 sqrt(e)))``, i.e. the root
    larger than 2 of ``gamma - 1 - 2 ln(gamma / eps) = 0``.

    Raises:
      EpsilonOutOfRange: unless ``0 < epsilon < 1``
    """
    _check_epsilon(epsilon)
    return -2.0 * lambert_w_minus1(-epsilon / (2.0 * SQRT_E)).value


def stationarity_residual(gamma, epsilon):
    """
    ``gamma - 1 - 2 ln(gamma / eps)``, the numerator of the derivative
    of :func:`c_general` in ``gamma``; it vanishes at :func:`gamma_eps`.
    """
    return gamma - 1.0 - 2.0 * math.log(gamma / epsilon)


def c_eps(epsilon):
    """
    ``c(eps) = 3 (gamma_eps - 1) / (5 gamma_eps**2)``.
    """
    gamma = gamma_eps(epsilon)
    return 3.0 * (gamma - 1.0) / (5.0 * gamma * gamma)


def c_general(gamma, epsilon):
    """
    The exponent per unit ``n eps`` obtained for an arbitrary ``gamma``::

        3 (gamma - 1)**2 / (10 gamma**2 ln(gamma / eps))

    Raises:
      GammaOutOfDomain: unless ``gamma > max(1, e eps)``
    """
    _check_epsilon(epsilon)
    if not gamma > max(1.0, math.e * epsilon):
        raise GammaOutOfDomain(
            "gamma must exceed max(1, e*eps) = {}, got {!r}"
            .format(max(1.0, math.e * epsilon), gamma))
    # ratio first: (gamma - 1)**2 overflows for huge gamma
    return 0.3 * ((gamma - 1.0) / gamma) ** 2 / math.log(gamma / epsilon)


def theta_star(epsilon):
    """
    The threshold that goes with the optimal gamma: ``ln(gamma_eps / eps)``;
    note that ``exp(-theta_star) = eps / gamma_eps``.
    """
    return math.log(gamma_eps(epsilon) / epsilon)


def gamma_bracket(epsilon):
    """
    Returns:
      tuple: the admissible search interval ``(max(e eps, 2) + 1e-9, 200)``
    """
    _check_epsilon(epsilon)
    return max(math.e * epsilon, 2.0) + 1e-9, GAMMA_UPPER


def optimize_gamma(epsilon):
    """
    Maximize :func:`c_general` numerically, independently of the
    Lambert W closed form.

    A bounded scalar minimization locates the optimum, then the root of
    :func:`stationarity_residual` is polished by bisection, first near that
    optimum, else over the full bracket.

    Raises:
      EpsilonOutOfRange: unless ``0 < epsilon < 1``
    """
    low, high = gamma_bracket(epsilon)
    found = optimize.minimize_scalar(
        lambda gamma: -c_general(gamma, epsilon),
        bounds=(low, high), method='bounded',
        options={'xatol': 1e-8})
    guess = float(found.x)

    def residual(gamma):
        return stationarity_residual(gamma, epsilon)

    near_low, near_high = max(low, guess * 0.99), min(high, guess * 1.01)
    if residual(near_low) * residual(near_high) < 0:
        low, high = near_low, near_high
    elif residual(low) * residual(high) > 0:
        # no sign change at all: trust the scalar search
        return guess
    return optimize.bisect(residual, low, high, xtol=ROOT_TOLERANCE)


def c_general_second_difference(gamma, epsilon, step=1e-3):
    """
    Central second difference of :func:`c_general` in ``gamma``;
    negative where the exponent is locally concave.
    """
    return (c_general(gamma + step, epsilon)
            - 2.0 * c_general(gamma, epsilon)
            + c_general(gamma - step, epsilon)) / (step * step)


def min_sample_size(epsilon):
    """
    ``n_min = ceil(gamma_eps) - 1``, the smallest sample size the bound
    is stated for.
    """
    return math.ceil(gamma_eps(epsilon)) - 1


def missing_mass_bound(epsilon, n, side='upper'):
    """
    Evaluate the bound for one ``(eps, n)`` query.

    Parameters:
      epsilon: deviation size in ``(0, 1)``
      n: sample size
      side: ``upper``, ``lower`` or ``two_sided``; the two-sided bound
        is twice the one-sided one, capped at 1.

    Returns:
      BoundResult

    Example:
      >>> result = missing_mass_bound(0.1, 100)
      >>> round(result.exponent, 3), result.domain_ok
      (0.528, True)
    """
    _check_epsilon(epsilon)
    if side not in SIDES:
        raise BadParam("side must be one of {}, got {!r}"
                       .format(", ".join(SIDES), side))
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise BadParam("n must be a non-negative integer, got {!r}"
                       .format(n))
    gamma = gamma_eps(epsilon)
    c = 3.0 * (gamma - 1.0) / (5.0 * gamma * gamma)
    exponent = c * n * epsilon
    log_bound = -exponent
    if side == 'two_sided':
        log_bound = min(0.0, math.log(2.0) + log_bound)
    n_min = math.ceil(gamma) - 1
    return BoundResult(
        epsilon=epsilon, n=int(n), gamma=gamma, c=c, exponent=exponent,
        log_bound=log_bound,
        bound=max(math.exp(log_bound), SMALLEST_BOUND),
        n_min=n_min, domain_ok=n >= n_min, side=side)


def bound_grid(epsilons, ns, side='upper'):
    """
    Returns:
      list[BoundResult]: one per ``(epsilon, n)``, sorted by
      epsilon then n.
    """
    return [missing_mass_bound(epsilon, n, side)
            for epsilon in sorted(epsilons) for n in sorted(ns)]


def compensation_gap_bound(epsilon):
    """
    ``sqrt(e) exp(W_{-1}(-eps / (2 sqrt(e))))``, which is also
    ``eps / gamma_eps``: the largest bias the split step may introduce
    at the optimal threshold.
    """
    _check_epsilon(epsilon)
    w = lambert_w_minus1(-epsilon / (2.0 * SQRT_E)).value
    return SQRT_E * math.exp(w)


def bernstein_bound(variance, alpha, epsilon):
    """
    Bernstein's inequality for a sum of independent centered variables
    bounded by ``alpha`` with total variance ``variance``::

        exp(-eps**2 / (2 (V + alpha eps / 3)))

    Raises:
      NegativeVariance: if ``variance < 0``
    """
    if variance < 0:
        raise NegativeVariance("variance must be >= 0, got {!r}"
                               .format(variance))
    if not alpha > 0 or not epsilon > 0:
        raise BadParam("alpha and epsilon must be > 0, got {!r} and {!r}"
                       .format(alpha, epsilon))
    return math.exp(-epsilon * epsilon
                    / (2.0 * (variance + alpha * epsilon / 3.0)))


def variance_proxy_bound(theta, n, epsilon):
    """
    ``(theta / n) exp(-theta)``, an upper bound on the variance proxy of
    the missing mass restricted to bins in ``[theta/n, 2 theta/n)``.

    Raises:
      ThetaOutOfRange: unless ``1 < theta < n`` and ``exp(-theta) < eps``
    """
    _check_epsilon(epsilon)
    if not 1 < theta < n:
        raise ThetaOutOfRange("theta must lie in (1, n) = (1, {}), got {!r}"
                              .format(n, theta))
    if not math.exp(-theta) < epsilon:
        raise ThetaOutOfRange(
            "exp(-theta) = {} must be smaller than epsilon = {}"
            .format(math.exp(-theta), epsilon))
    return theta / n * math.exp(-theta)


def comparator_bound(comparator, epsilon, n):
    """
    Returns:
      float: ``exp(-a n eps**2)`` for the given comparator.
    """
    return math.exp(-comparator.coefficient * n * epsilon * epsilon)


CROSSOVER_INTERVAL = (1e-6, 0.99)


def crossover(comparator, interval=CROSSOVER_INTERVAL, grid_size=200):
    """
    The deviation size ``eps*`` below which ``exp(-c(eps) n eps)`` beats
    ``exp(-a n eps**2)``, i.e. the root of ``c(eps)/eps = a``.

    ``c(eps)/eps`` is first checked to be strictly decreasing on a
    log-spaced grid over ``interval``, then the root is bisected.

    Raises:
      NoCrossover: if there is no sign change on the interval
    """
    low, high = interval
    grid = np.geomspace(low, high, grid_size)
    ratios = np.array([c_eps(epsilon) / epsilon for epsilon in grid])
    if not np.all(np.diff(ratios) < 0):
        raise NoCrossover("c(eps)/eps is not decreasing on [{}, {}]"
                          .format(low, high))

    def gap(epsilon):
        return c_eps(epsilon) / epsilon - comparator.coefficient

    if gap(low) * gap(high) > 0:
        raise NoCrossover(
            "c(eps)/eps never equals {} on [{}, {}]"
            .format(comparator.coefficient, low, high))
    return optimize.bisect(gap, low, high, xtol=ROOT_TOLERANCE)
