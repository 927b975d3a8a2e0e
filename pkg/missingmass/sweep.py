"""
Helpers that turn a large numeric workload into scheduler jobs.

Trials are cut into chunks; chunk ``k`` draws from its own generator,
seeded from ``SeedSequence(seed).spawn(...)[k]``, i.e. from the pair
(master seed, chunk index). Results are merged in chunk order, so the
outcome depends only on the seed, the number of trials and the chunk
size, and never on the window size nor on thread timing.

Generator family: ``numpy.random.PCG64``.
"""

import os

import numpy as np

from .job import ComputeJob
from .scheduler import Scheduler

DEFAULT_SEED = 20130429
"""Seed used when none is given; ``MISSINGMASS_SEED`` overrides it."""

DEFAULT_CHUNK = 20_000
"""Number of trials per chunk."""


def default_seed():
    """
    Returns:
      int: the value of ``MISSINGMASS_SEED`` if set, else
      :data:`DEFAULT_SEED`.
    """
    value = os.environ.get("MISSINGMASS_SEED")
    if value is None or value.strip() == "":
        return DEFAULT_SEED
    return int(value, 0)


def default_jobs_window():
    """
    Returns:
      int or None: the value of ``MISSINGMASS_JOBS`` if set,
      else the number of CPUs.
    """
    value = os.environ.get("MISSINGMASS_JOBS")
    if value:
        return int(value)
    return os.cpu_count() or 1


def split_trials(trials, chunk=DEFAULT_CHUNK):
    """
    Cut ``trials`` into consecutive chunk sizes.

    Returns:
      list[int]: sizes that sum to ``trials``, all equal to ``chunk``
      except possibly the last one.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1, got {}".format(trials))
    if chunk < 1:
        raise ValueError("chunk must be >= 1, got {}".format(chunk))
    full, rest = divmod(trials, chunk)
    return [chunk] * full + ([rest] if rest else [])


def spawn_generators(seed, count):
    """
    Returns:
      list[numpy.random.Generator]: ``count`` independent streams,
      the k-th one being fully determined by (seed, k).
    """
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.Generator(np.random.PCG64(child)) for child in children]


def run_chunks(function, payloads, *, jobs_window=None,
               verbose=False, watch=None, label=None):
    """
    Run ``function(*payload)`` for each payload, each in its own
    :class:`~missingmass.job.ComputeJob`, and return the results
    in payload order.

    Parameters:
      function: a blocking callable
      payloads: a list of argument tuples
      jobs_window: max number of simultaneous chunks
      verbose: scheduler feedback on stderr
      watch: passed to the scheduler
      label: prefix for the job labels

    Raises:
      the exception of a failing chunk, or
      :class:`~missingmass.errors.SchedulingError`
    """
    scheduler = Scheduler(jobs_window=jobs_window,
                          verbose=verbose, watch=watch)
    for index, payload in enumerate(payloads):
        job_label = None if label is None \
            else "{} #{}".format(label, index)
        ComputeJob(function, *payload, label=job_label, scheduler=scheduler)
    return scheduler.run_or_raise()
