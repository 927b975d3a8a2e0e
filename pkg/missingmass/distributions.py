"""
Finite discrete distributions, and the transformations used by the
thresholding argument: splitting of large bins, absorption of small bins,
and coarse binning along a partition of the outcomes.

Indices are 0-based.
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    NonPositiveWeight, SumTooFarFromOne, BadParam, ThetaOutOfRange,
    NotSplit, NoMidBin, BadPartition, UsageError)

SUM_TOLERANCE = 1e-12
"""A distribution's weights sum to one within this tolerance."""

RENORMALIZE_TOLERANCE = 1e-6
"""Inputs within that distance of one are renormalized, others rejected."""

FAMILIES = ('uniform', 'zipf', 'geometric', 'spike')


@dataclass(frozen=True, eq=False)
class DiscreteDistribution:
    """
    A finite distribution with positive weights.

    When ``subdistribution`` is set, the weights only need to sum to
    at most one; this is what :func:`absorb` and :func:`truncate_above`
    produce once part of the mass has been set aside.

    Instances are immutable; ``weights`` is a read-only numpy array.
    """

    weights: np.ndarray
    labels: tuple = None
    subdistribution: bool = False

    def __post_init__(self):
        weights = np.array(self.weights, dtype=np.float64)
        if weights.ndim != 1 or weights.size == 0:
            raise BadParam("weights must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(weights)):
            raise BadParam("weights must be finite")
        if np.any(weights <= 0):
            raise NonPositiveWeight(
                "weight #{} is not positive: {}"
                .format(int(np.argmax(weights <= 0)),
                        weights[weights <= 0][0]))
        total = math.fsum(weights)
        if self.subdistribution:
            if total > 1 + SUM_TOLERANCE:
                raise SumTooFarFromOne(
                    "sub-distribution has total mass {!r} > 1".format(total))
        elif abs(total - 1) > SUM_TOLERANCE:
            raise SumTooFarFromOne(
                "weights sum to {!r}, not 1".format(total))
        weights.setflags(write=False)
        object.__setattr__(self, 'weights', weights)
        if self.labels is not None:
            labels = tuple(str(label) for label in self.labels)
            if len(labels) != weights.size:
                raise BadParam("{} labels for {} weights"
                               .format(len(labels), weights.size))
            object.__setattr__(self, 'labels', labels)

    def __len__(self):
        return self.weights.size

    def __eq__(self, other):
        if not isinstance(other, DiscreteDistribution):
            return NotImplemented
        return (np.array_equal(self.weights, other.weights)
                and self.labels == other.labels
                and self.subdistribution == other.subdistribution)

    __hash__ = None

    @property
    def size(self):
        """number of bins N"""
        return self.weights.size

    @property
    def mass(self):
        """total mass, 1 unless this is a sub-distribution"""
        return math.fsum(self.weights)

    def label(self, index):
        """
        Returns:
          str: the label of bin ``index``, or the index itself
          as a string when the distribution has no labels.
        """
        if self.labels is None:
            return str(index)
        return self.labels[index]

    def to_dict(self):
        """
        Returns:
          dict: ``{"weights": [...], "labels": [...]}``, labels omitted
          when absent, and a ``subdistribution`` key only when set.
        """
        result = {"weights": [float(w) for w in self.weights]}
        if self.labels is not None:
            result["labels"] = list(self.labels)
        if self.subdistribution:
            result["subdistribution"] = True
        return result

    def to_json(self):
        """
        Returns:
          str: the JSON document; python floats are written with
          enough digits (at most 17 significant) to round-trip.
        """
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data):
        """
        Build from the JSON shape; weights may be numbers or
        decimal strings, and are renormalized like
        :func:`make_distribution` does.
        """
        try:
            weights = [float(w) for w in data["weights"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError("bad distribution document: {}".format(exc))
        return make_distribution(
            weights, labels=data.get("labels"),
            subdistribution=bool(data.get("subdistribution", False)))


@dataclass(frozen=True)
class ThresholdPartition:
    """
    The three-way split of the bins of a distribution induced by
    the thresholds ``tau = theta/n`` and ``tau_prime = 2 theta/n``:

    * ``below``: bins with ``w < tau``
    * ``mid``: bins with ``tau <= w < tau_prime``
    * ``above``: bins with ``w >= tau_prime``
    """

    theta: float
    n: int
    tau: float
    tau_prime: float
    below: tuple
    mid: tuple
    above: tuple


@dataclass(frozen=True)
class PartitionSpec:
    """
    A partition of the indices ``0..N-1`` into non-empty disjoint groups.

    Use :meth:`validate` to check it against a given support size.
    """

    groups: tuple = field(default_factory=tuple)

    def __post_init__(self):
        groups = tuple(tuple(int(i) for i in group) for group in self.groups)
        object.__setattr__(self, 'groups', groups)

    def validate(self, size):
        """
        Raises:
          BadPartition: unless the groups are non-empty, pairwise disjoint
          and cover exactly ``range(size)``.
        """
        seen = set()
        for group in self.groups:
            if not group:
                raise BadPartition("empty group in partition")
            for index in group:
                if index in seen:
                    raise BadPartition(
                        "index {} appears in several groups".format(index))
                if not 0 <= index < size:
                    raise BadPartition(
                        "index {} outside 0..{}".format(index, size - 1))
                seen.add(index)
        if len(seen) != size:
            raise BadPartition("partition covers {} of {} indices"
                               .format(len(seen), size))
        return self

    def is_contiguous(self):
        """
        Returns:
          bool: whether each group is a run of consecutive indices,
          and groups come in increasing order.
        """
        expected = 0
        for group in self.groups:
            if sorted(group) != list(range(expected, expected + len(group))):
                return False
            expected += len(group)
        return True

    @classmethod
    def singletons(cls, size):                          # pylint: disable=c0116
        return cls(tuple((i,) for i in range(size)))

    @classmethod
    def from_dict(cls, data):
        """
        Build from ``{"groups": [[0, 1], [2]]}``.
        """
        try:
            return cls(tuple(tuple(group) for group in data["groups"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError("bad partition document: {}".format(exc))


def make_distribution(weights, *, labels=None, subdistribution=False):
    """
    Validate and normalize weights.

    Weights within :data:`RENORMALIZE_TOLERANCE` of summing to one are
    renormalized to remove rounding noise; anything further away is
    considered a caller error.

    Raises:
      NonPositiveWeight: a weight is zero or negative.
      SumTooFarFromOne: the weights do not come close to summing to one.
    """
    weights = np.asarray(weights, dtype=np.float64)
    if weights.ndim != 1 or weights.size == 0:
        raise BadParam("weights must be a non-empty 1-D sequence")
    if np.any(weights <= 0):
        bad = int(np.argmax(weights <= 0))
        raise NonPositiveWeight("weight #{} is not positive: {}"
                                .format(bad, weights[bad]))
    total = math.fsum(weights)
    if subdistribution:
        if total > 1 + RENORMALIZE_TOLERANCE:
            raise SumTooFarFromOne(
                "sub-distribution has total mass {!r} > 1".format(total))
        if total > 1:
            weights = weights / total
    else:
        if abs(total - 1) > RENORMALIZE_TOLERANCE:
            raise SumTooFarFromOne("weights sum to {!r}, expected 1"
                                   .format(total))
        weights = weights / total
    return DiscreteDistribution(weights, labels, subdistribution)


def make_family(kind, size, param=None):
    """
    Build one of the test-corpus families on ``size`` outcomes:

    * ``uniform``: all weights ``1/size``, ``param`` ignored;
    * ``zipf``: ``w_i`` proportional to ``(i+1)**-param``, ``param > 0``;
    * ``geometric``: ``w_i`` proportional to ``param**(i+1)``,
      ``0 < param < 1``;
    * ``spike``: one bin of mass ``param`` and the rest spread uniformly,
      ``0 < param < 1``.

    Raises:
      BadParam: for an unknown kind or an out-of-range parameter.
    """
    if not isinstance(size, (int, np.integer)) or size < 1:
        raise BadParam("size must be a positive integer, got {!r}"
                       .format(size))
    ranks = np.arange(1, size + 1, dtype=np.float64)
    if kind == 'uniform':
        weights = np.full(size, 1.0 / size)
    elif kind == 'zipf':
        if param is None or not param > 0:
            raise BadParam("zipf exponent must be > 0, got {!r}"
                           .format(param))
        weights = ranks ** -float(param)
    elif kind == 'geometric':
        if param is None or not 0 < param < 1:
            raise BadParam("geometric ratio must be in (0,1), got {!r}"
                           .format(param))
        # in log space, so that long supports do not underflow to zero
        logs = ranks * math.log(param)
        weights = np.exp(logs - logs.max())
    elif kind == 'spike':
        if param is None or not 0 < param < 1:
            raise BadParam("spike mass must be in (0,1), got {!r}"
                           .format(param))
        if size == 1:
            raise BadParam("spike needs at least 2 outcomes")
        weights = np.full(size, (1.0 - param) / (size - 1))
        weights[0] = param
    else:
        raise BadParam("unknown family {!r}, expected one of {}"
                       .format(kind, ", ".join(FAMILIES)))
    return make_distribution(weights / math.fsum(weights))


def _check_theta(theta, n):
    if not 0 < theta < n:
        raise ThetaOutOfRange(
            "theta must lie in (0, n) = (0, {}), got {!r}".format(n, theta))


def partition_by_threshold(dist, theta, n):
    """
    Classify each bin against ``tau = theta/n`` and ``tau_prime = 2 tau``,
    using half-open intervals: a bin equal to ``tau`` is mid-range,
    a bin equal to ``tau_prime`` is above.

    Raises:
      ThetaOutOfRange: unless ``0 < theta < n``.
    """
    _check_theta(theta, n)
    tau = theta / n
    tau_prime = 2 * tau
    weights = dist.weights
    return ThresholdPartition(
        theta=theta, n=n, tau=tau, tau_prime=tau_prime,
        below=tuple(int(i) for i in np.flatnonzero(weights < tau)),
        mid=tuple(int(i) for i in np.flatnonzero((weights >= tau)
                                                 & (weights < tau_prime))),
        above=tuple(int(i) for i in np.flatnonzero(weights >= tau_prime)))


def piece_count(weight, tau):
    """
    Returns:
      int: the number ``k`` of pieces a bin of size ``weight >= tau``
      is split into, i.e. ``k tau <= weight < (k+1) tau``; a ratio that
      lands one ulp below an integer is rounded up, so that a bin of
      exactly ``k tau`` gives ``k`` pieces.
    """
    ratio = weight / tau
    count = math.floor(ratio)
    if math.floor(math.nextafter(ratio, math.inf)) > count:
        count += 1
    return max(count, 1)


def split_pieces(weight, tau):
    """
    The k-piece rule for one bin: ``k-1`` pieces of size ``tau`` and
    a last piece ``weight - (k-1) tau``, in ``[tau, 2 tau)``.

    Bins below ``tau`` are returned unchanged as a single piece.

    Returns:
      list[float]
    """
    if weight < tau:
        return [weight]
    count = piece_count(weight, tau)
    return [tau] * (count - 1) + [weight - (count - 1) * tau]


def split_origin(dist, theta, n):
    """
    Returns:
      list[int]: for each bin of ``split(dist, theta, n)``, the index
      of the input bin it comes from.
    """
    _check_theta(theta, n)
    tau = theta / n
    origin = []
    for index, weight in enumerate(dist.weights):
        origin.extend([index] * len(split_pieces(float(weight), tau)))
    return origin


def split(dist, theta, n):
    """
    Replace each bin ``w >= tau`` by the pieces of :func:`split_pieces`,
    in place, so that no output bin reaches ``tau_prime = 2 tau``.
    Bins below ``tau`` pass through. Total mass is preserved.

    Labels, when present, become ``label#j`` for the j-th piece of a
    split bin.

    Raises:
      ThetaOutOfRange: unless ``0 < theta < n``.
    """
    _check_theta(theta, n)
    tau = theta / n
    weights, labels = [], []
    for index, weight in enumerate(dist.weights):
        pieces = split_pieces(float(weight), tau)
        weights.extend(pieces)
        if len(pieces) == 1:
            labels.append(dist.label(index))
        else:
            labels.extend("{}#{}".format(dist.label(index), j)
                          for j in range(len(pieces)))
    return DiscreteDistribution(
        weights, tuple(labels) if dist.labels is not None else None,
        dist.subdistribution)


def truncate_above(dist, threshold):
    """
    Drop every bin ``w >= threshold``.

    Returns:
      DiscreteDistribution: a sub-distribution holding the remaining bins.

    Raises:
      NoMidBin: if no bin remains.
    """
    keep = np.flatnonzero(dist.weights < threshold)
    if keep.size == 0:
        raise NoMidBin("all bins are >= {}".format(threshold))
    labels = None if dist.labels is None \
        else tuple(dist.labels[i] for i in keep)
    return DiscreteDistribution(dist.weights[keep], labels, True)


def absorb(dist, theta, n):
    """
    Absorb the sub-``tau`` bins of an already split distribution.

    The largest bin below ``tau`` is repeatedly discarded and its mass
    spread equally over the remaining bins below ``tau``, until at most
    one such bin is left; that residual bin is then added to the first
    mid-range bin of size exactly ``tau``, or failing that to the
    smallest mid-range bin (or, if that would reach ``tau_prime``,
    spread equally over all mid-range bins).

    The result has all its bins in ``[tau, tau_prime)``, and the same total
    mass as the input; it is flagged as a sub-distribution.

    Raises:
      ThetaOutOfRange: unless ``0 < theta < n``.
      NotSplit: a bin is ``>= tau_prime``.
      NoMidBin: there is no mid-range bin to absorb the residual into.
    """
    _check_theta(theta, n)
    tau = theta / n
    tau_prime = 2 * tau
    weights = np.array(dist.weights, dtype=np.float64)
    if np.any(weights >= tau_prime):
        raise NotSplit("{} bin(s) >= tau_prime={}, split first"
                       .format(int(np.sum(weights >= tau_prime)), tau_prime))
    alive = np.ones(weights.size, dtype=bool)

    def small():
        return np.flatnonzero(alive & (weights < tau))

    while (smalls := small()).size > 1:
        largest = smalls[np.argmax(weights[smalls])]
        receivers = smalls[smalls != largest]
        weights[receivers] += weights[largest] / receivers.size
        alive[largest] = False

    smalls = small()
    if smalls.size == 1:
        residual = smalls[0]
        mids = np.flatnonzero(alive & (weights >= tau))
        if mids.size == 0:
            raise NoMidBin("no bin in [tau, tau_prime) to absorb into")
        exact = mids[weights[mids] == tau]
        if exact.size:
            target = exact[:1]
        else:
            target = mids[[np.argmin(weights[mids])]]
            if weights[target[0]] + weights[residual] >= tau_prime:
                target = mids
        weights[target] += weights[residual] / target.size
        alive[residual] = False
        if np.any(weights[target] >= tau_prime):
            raise NoMidBin("residual mass {} does not fit below tau_prime"
                           .format(dist.weights[residual]))

    labels = None if dist.labels is None \
        else tuple(dist.labels[i] for i in np.flatnonzero(alive))
    return DiscreteDistribution(weights[alive], labels, True)


def coarse_bin(dist, spec):
    """
    The distribution induced on the groups of a partition:
    output weight ``i`` is the total weight of group ``i``.

    Raises:
      BadPartition: unless ``spec`` is a partition of the index set.
    """
    spec.validate(dist.size)
    weights = [math.fsum(dist.weights[list(group)]) for group in spec.groups]
    return DiscreteDistribution(weights, None, dist.subdistribution)


def parse_spec(text):
    """
    Parse the command line SPEC grammar::

        uniform:N=10
        zipf:N=100,s=1.5
        geometric:N=20,r=0.7
        spike:N=50,m=0.5
        file:path/to/dist.json

    Raises:
      UsageError: for malformed specs
      BadParam: for well-formed specs with out-of-range parameters
    """
    kind, sep, rest = text.partition(':')
    if not sep:
        raise UsageError("bad distribution spec {!r}, expected KIND:ARGS"
                         .format(text))
    if kind == 'file':
        return load_distribution(rest)
    params = {}
    for item in filter(None, rest.split(',')):
        key, sep, value = item.partition('=')
        if not sep:
            raise UsageError("bad parameter {!r} in spec {!r}"
                             .format(item, text))
        params[key.strip()] = value.strip()
    param_names = {'uniform': None, 'zipf': 's',
                   'geometric': 'r', 'spike': 'm'}
    if kind not in param_names:
        raise UsageError("unknown distribution kind {!r}".format(kind))
    try:
        size = int(params.pop('N'))
        name = param_names[kind]
        param = float(params.pop(name)) if name is not None else None
    except KeyError as exc:
        raise UsageError("missing parameter {} in spec {!r}"
                         .format(exc, text))
    except ValueError as exc:
        raise UsageError("bad value in spec {!r}: {}".format(text, exc))
    if params:
        raise UsageError("unexpected parameter(s) {} in spec {!r}"
                         .format(", ".join(sorted(params)), text))
    return make_family(kind, size, param)


def load_distribution(path):
    """
    Read a distribution from a JSON document
    ``{"weights": [...], "labels": [...]}``.

    Raises:
      UsageError: unreadable file or malformed document
    """
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError("cannot read distribution {}: {}"
                         .format(path, exc))
    return DiscreteDistribution.from_dict(data)
