"""
The lower real branch ``W_{-1}`` of the Lambert W function,
i.e. the inverse of ``w -> w e^w`` restricted to ``w <= -1``,
defined on ``[-1/e, 0)``.

Initial guesses come from the series expansion around the branch point
``-1/e``, or from the asymptotic expansion near 0;
they are then refined with Halley's method.
"""

import math
from dataclasses import dataclass

from .errors import LambertDomainError

BRANCH_POINT = -math.exp(-1)
"""``-1/e``, where both real branches meet at ``w = -1``."""

MAX_ITERATIONS = 50
STEP_TOLERANCE = 1e-14
STALL_TOLERANCE = 1e-8
"""Below that relative step size, a step that does not shrink ends the
iteration: it is rounding noise."""
BRANCH_GUARD = 1e-12


@dataclass(frozen=True)
class WResult:
    """
    Outcome of one evaluation.

    Attributes:
      value: ``w <= -1`` such that ``w e^w`` is close to ``x``
      residual: ``|w e^w - x|``
      iterations: number of Halley steps performed
    """

    value: float
    residual: float
    iterations: int


def _initial_guess(x):
    if x < -0.25:
        # series in p = -sqrt(2 (e x + 1)) around the branch point
        p = -math.sqrt(max(2.0 * (math.e * x + 1.0), 0.0))
        return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p ** 3
    l1 = math.log(-x)
    l2 = math.log(-l1)
    return l1 - l2 + l2 / l1


def lambert_w_minus1(x):
    """
    Evaluate ``W_{-1}(x)``.

    Parameters:
      x: a real in ``[-1/e, 0)``

    Returns:
      WResult: at ``x = -1/e``, and within ``1e-12`` of it, the value is
      exactly ``-1``.

    Raises:
      LambertDomainError: if ``x`` is outside ``[-1/e, 0)``;
        ``W_{-1}`` diverges to ``-inf`` at 0.

    Example:
      >>> round(lambert_w_minus1(-0.1).value, 6)
      -3.577152
    """
    x = float(x)
    if not math.isfinite(x) or x >= 0 or x < BRANCH_POINT - BRANCH_GUARD:
        raise LambertDomainError(
            "W_-1 is defined on [-1/e, 0), got {!r}".format(x))
    if abs(x - BRANCH_POINT) < BRANCH_GUARD:
        return WResult(-1.0, abs(-math.exp(-1.0) - x), 0)

    w = _initial_guess(x)
    iterations = 0
    last_step = math.inf
    for iterations in range(1, MAX_ITERATIONS + 1):
        ew = math.exp(w)
        f = w * ew - x
        if f == 0.0:
            break
        wp1 = w + 1.0
        if wp1 == 0.0:
            break
        denominator = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        if denominator == 0.0:
            break
        step = f / denominator
        scale = 1.0 + abs(w)
        if abs(step) >= last_step and abs(step) <= STALL_TOLERANCE * scale:
            break
        w -= step
        if abs(step) <= STEP_TOLERANCE * scale:
            break
        last_step = abs(step)
    w = min(w, -1.0)
    return WResult(w, abs(w * math.exp(w) - x), iterations)
