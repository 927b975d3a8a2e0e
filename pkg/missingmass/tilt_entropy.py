"""
Chernoff entropy, exponential tilting and KL divergence for random
variables with finite support, and a numeric check that the Chernoff
entropy can only decrease when outcomes are merged into coarser groups.

A merged group is represented by its largest value, so that the coarse
variable dominates the fine one pointwise; its moment generating function
is then larger for every ``lambda >= 0``, which is what makes the
comparison of entropies go the right way.
"""

import math
from dataclasses import dataclass, asdict

import numpy as np
from scipy import optimize, special

from .errors import (
    XOutsideSupportHull, SupportMismatch, BadPartition, BadParam, UsageError)

LAMBDA_SPAN = 700.0
"""``lambda * range(values)`` stays below this, so that ``exp`` never
overflows."""

LAMBDA_TOLERANCE = 1e-12
MONOTONICITY_SLACK = 1e-9
KL_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class FinitePMF:
    """
    A random variable with finite support: ``P(X = values[i]) = probs[i]``.

    Values are strictly increasing, probabilities positive and summing to
    one within ``1e-12``. Use :meth:`make` to sort and renormalize input.
    """

    values: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        probs = np.array(self.probs, dtype=np.float64)
        if values.ndim != 1 or values.size == 0 or values.shape != probs.shape:
            raise BadParam("values and probs must be matching non-empty "
                           "1-D sequences")
        if np.any(np.diff(values) <= 0):
            raise BadParam("values must be strictly increasing")
        if np.any(probs <= 0):
            raise BadParam("probabilities must be positive")
        if abs(math.fsum(probs) - 1.0) > 1e-12:
            raise BadParam("probabilities sum to {!r}, not 1"
                           .format(math.fsum(probs)))
        values.setflags(write=False)
        probs.setflags(write=False)
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'probs', probs)

    @classmethod
    def make(cls, values, probs):
        """
        Sort by value, merge repeated values, and renormalize.
        """
        values = np.asarray(values, dtype=np.float64)
        probs = np.asarray(probs, dtype=np.float64)
        if values.ndim != 1 or values.shape != probs.shape:
            raise BadParam("values and probs must be matching 1-D sequences")
        if np.any(probs <= 0):
            raise BadParam("probabilities must be positive")
        unique, inverse = np.unique(values, return_inverse=True)
        merged = np.bincount(inverse, weights=probs, minlength=unique.size)
        return cls(unique, merged / merged.sum())

    @classmethod
    def from_dict(cls, data):
        """
        Build from ``{"values": [...], "probs": [...]}``.

        Raises:
          UsageError: if the document is not made of two lists of numbers
        """
        try:
            values = [float(v) for v in data["values"]]
            probs = [float(p) for p in data["probs"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError("bad pmf document: {}".format(exc))
        return cls.make(values, probs)

    def to_dict(self):                                  # pylint: disable=c0116
        return {"values": self.values.tolist(), "probs": self.probs.tolist()}

    def __len__(self):
        return self.values.size

    def mean(self):                                     # pylint: disable=c0116
        return float(np.dot(self.values, self.probs))


def log_mgf(pmf, lam):
    """
    ``ln E[exp(lambda X)]``, through ``logsumexp``.
    """
    return float(special.logsumexp(lam * pmf.values, b=pmf.probs))


def _log_tilted(pmf, lam):
    logits = lam * pmf.values + np.log(pmf.probs)
    return logits - special.logsumexp(logits)


def tilt(pmf, lam):
    """
    The exponentially tilted variable
    ``P_lambda(X = x) = exp(lambda x) P(X = x) / E[exp(lambda X)]``.

    Probabilities that underflow are kept at the smallest positive double.
    """
    probs = np.maximum(np.exp(_log_tilted(pmf, lam)), np.finfo(float).tiny)
    return FinitePMF(pmf.values, probs / probs.sum())


def tilted_mean(pmf, lam):
    """
    ``E_lambda[X]``, the derivative of :func:`log_mgf` at ``lambda``.
    """
    return float(np.dot(pmf.values, np.exp(_log_tilted(pmf, lam))))


def kl(p, q):
    """
    ``KL(p || q) = sum_i p_i ln(p_i / q_i)``.

    Raises:
      SupportMismatch: unless both variables have the same support
    """
    if p.values.shape != q.values.shape \
            or not np.array_equal(p.values, q.values):
        raise SupportMismatch("KL needs both variables on the same support")
    return float(np.sum(special.rel_entr(p.probs, q.probs)))


def tail(pmf, x):
    """
    The exact tail ``P(X >= x)``.
    """
    return float(np.sum(pmf.probs[pmf.values >= x]))


def _check_hull(pmf, x):
    if x > pmf.values[-1]:
        raise XOutsideSupportHull(
            "x = {!r} lies above the largest value {!r}"
            .format(x, pmf.values[-1]))


def optimal_lambda(pmf, x):
    """
    The tilt ``lambda* >= 0`` that achieves the Chernoff supremum at ``x``:
    the root of ``E_lambda[X] = x``.

    Returns:
      float: 0 when ``x <= E[X]``; ``inf`` when ``x`` is the largest
      value; the end of the search bracket ``700 / range`` when the
      tilted mean does not reach ``x`` inside it.

    Raises:
      XOutsideSupportHull: if ``x`` exceeds the largest value
    """
    _check_hull(pmf, x)
    if x <= pmf.mean():
        return 0.0
    if x == pmf.values[-1]:
        return math.inf
    high = LAMBDA_SPAN / (pmf.values[-1] - pmf.values[0])
    if tilted_mean(pmf, high) <= x:
        return high
    return optimize.brentq(lambda lam: tilted_mean(pmf, lam) - x,
                           0.0, high, xtol=LAMBDA_TOLERANCE)


def chernoff_entropy(pmf, x):
    """
    ``S(X, x) = sup_{lambda >= 0} (lambda x - ln E[exp(lambda X)])``.

    Since ``P(X >= x) <= exp(-S(X, x))``, this is the exponent of the
    Chernoff bound on the upper tail.

    Returns:
      float: 0 for ``x <= E[X]``; ``-ln P(X = max)`` when ``x`` is the
      largest value.

    Raises:
      XOutsideSupportHull: if ``x`` exceeds the largest value, where the
        supremum is infinite
    """
    lam = optimal_lambda(pmf, x)
    if lam == 0.0:
        return 0.0
    if math.isinf(lam):
        return -math.log(pmf.probs[-1])
    return max(0.0, lam * x - log_mgf(pmf, lam))


def coarsen(pmf, spec):
    """
    Merge the outcomes of each group of ``spec`` into one outcome, whose
    probability is the group's total and whose value is the group's
    largest value.

    Raises:
      BadPartition: unless ``spec`` is a partition of the outcomes into
        runs of consecutive values
    """
    spec.validate(len(pmf))
    if not spec.is_contiguous():
        raise BadPartition("groups must be runs of consecutive values, "
                           "listed in increasing order")
    values = [pmf.values[max(group)] for group in spec.groups]
    probs = [math.fsum(pmf.probs[list(group)]) for group in spec.groups]
    probs = np.asarray(probs)
    return FinitePMF(values, probs / probs.sum())


def _group_masses(pmf, spec):
    return np.array([math.fsum(pmf.probs[list(group)])
                     for group in spec.groups])


@dataclass(frozen=True)
class MonotonicityReport:                               # pylint: disable=r0902
    """
    Outcome of :func:`check_partition_monotonicity`.

    Attributes:
      entropy_fine: ``S(X, x)``
      entropy_coarse: ``S(X^G, x)``
      lambda_star: the optimal tilt for ``X`` at ``x``, None if infinite
      kl_fine: ``KL(p_lambda* || p)``, None when ``lambda_star`` is None
      kl_coarse: same, on group masses
      chernoff_tail: ``P(X >= x)``
      holds: ``S(X, x) >= S(X^G, x) - 1e-9``
      kl_holds: ``kl_coarse <= kl_fine``, up to ``1e-12``
      chernoff_holds: ``exp(-S(X, x)) >= P(X >= x)``
    """

    x: float
    entropy_fine: float
    entropy_coarse: float
    lambda_star: float | None
    kl_fine: float | None
    kl_coarse: float | None
    chernoff_tail: float
    holds: bool
    kl_holds: bool
    chernoff_holds: bool

    @property
    def ok(self):                                       # pylint: disable=c0116
        return self.holds and self.kl_holds and self.chernoff_holds

    def to_dict(self):                                  # pylint: disable=c0116
        result = asdict(self)
        result['ok'] = self.ok
        return result


def check_partition_monotonicity(pmf, spec, x):
    """
    Compare the Chernoff entropies of ``X`` and of its coarsening along
    ``spec`` at ``x``, and check the divergence step on the tilted
    variable: merging outcomes cannot increase ``KL(p_lambda* || p)``.

    Raises:
      XOutsideSupportHull: like :func:`chernoff_entropy`
      BadPartition: like :func:`coarsen`
    """
    coarse = coarsen(pmf, spec)
    entropy_fine = chernoff_entropy(pmf, x)
    entropy_coarse = chernoff_entropy(coarse, x)
    lam = optimal_lambda(pmf, x)
    kl_fine = kl_coarse = None
    kl_holds = True
    if not math.isinf(lam):
        tilted = tilt(pmf, lam)
        kl_fine = kl(tilted, pmf)
        kl_coarse = float(np.sum(special.rel_entr(
            _group_masses(tilted, spec), _group_masses(pmf, spec))))
        kl_holds = kl_coarse <= kl_fine + KL_SLACK
    exact_tail = tail(pmf, x)
    return MonotonicityReport(
        x=float(x), entropy_fine=entropy_fine, entropy_coarse=entropy_coarse,
        lambda_star=None if math.isinf(lam) else lam,
        kl_fine=kl_fine, kl_coarse=kl_coarse, chernoff_tail=exact_tail,
        holds=entropy_fine >= entropy_coarse - MONOTONICITY_SLACK,
        kl_holds=kl_holds,
        chernoff_holds=math.exp(-entropy_fine) >= exact_tail - KL_SLACK)
