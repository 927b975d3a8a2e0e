# -*- coding: utf-8 -*-

"""
This module defines :class:`AbstractJob`, the base class for all the
units of work that a :class:`~missingmass.scheduler.Scheduler` runs,
as well as two concrete subclasses:

* :class:`Job` for creating a job from a coroutine;
* :class:`ComputeJob` for running a plain (CPU-bound) python callable,
  typically one chunk of Monte-Carlo trials, in a worker thread.
"""

import sys
import asyncio

# pylint settings
# W0212: the scheduler accesses protected members of its jobs
# pylint: disable=W0212


class AbstractJob:                                      # pylint: disable=R0902
    """
    AbstractJob is a virtual class:

    * it offers some very basic graph-related features
      to model requirements *a la* Makefile;
    * its subclasses are expected to implement a `co_run()` method,
      a coroutine that specifies the actual behaviour of the job.

    **Life Cycle**: jobs follow a common life cycle,
    which can be summarized as follows:

      **idle** → **scheduled** → **running** → **done**

    In windowed orchestrations - see the ``jobs_window`` attribute of
    :class:`~missingmass.scheduler.Scheduler` - a job can be scheduled but
    not yet running, because it is waiting for a slot in the window.

    Args:

        critical (bool): if set, any exception raised during the
          execution of that job results in the scheduler aborting
          its run immediately; jobs are critical by default.

        required: this can be one, or a collection of, jobs that will
          make the job's requirements;
          requirements can be added later on as well.

        label (str): how the job is displayed in verbose feedback
          and by :meth:`~missingmass.scheduler.Scheduler.list()`.

        scheduler: if provided, the newly created job instance is
          immediately added in that scheduler.
    """

    def __init__(self, *, critical=True, label=None,
                 required=None, scheduler=None):
        self.critical = critical
        self.label = label
        # insertion order is kept, so listings are reproducible
        self.required = []
        self.requires(required)
        if scheduler is not None:
            scheduler.add(self)
        # once submitted, `co_run()` gets embedded in a Task object
        self._task = None
        # this is updated by the Window class when the job makes it through
        self._running = False
        # ==== fields for our friend Scheduler all start with _s_
        self._s_mark = None
        self._s_successors = []
        self._sched_id = None

    def requires(self, *requirements):
        """
        Add requirements to a job.

        Parameters:
          requirements: each is a job, or a collection of jobs,
            or None which is ignored.
        """
        for requirement in requirements:
            if requirement is None:
                continue
            if isinstance(requirement, AbstractJob):
                batch = [requirement]
            else:
                batch = list(requirement)
            for job in batch:
                if job not in self.required:
                    self.required.append(job)

    def _set_sched_id(self, index, id_format):
        self._sched_id = id_format.format(index)

    ##########
    _has_support_for_unicode = None  # type: bool

    @classmethod
    def _detect_support_for_unicode(cls):
        if cls._has_support_for_unicode is None:
            try:
                cls._c_saltire.encode(sys.stderr.encoding or 'UTF-8')
                cls._has_support_for_unicode = True
            except UnicodeEncodeError:
                cls._has_support_for_unicode = False
        return cls._has_support_for_unicode

    _c_saltire = "\u2613"     # ☓
    _c_circle_arrow = "\u21ba"  # ↺
    _c_black_flag = "\u2691"  # ⚑
    _c_white_flag = "\u2690"  # ⚐
    _c_warning = "\u26a0"     # ⚠
    _c_black_star = "\u2605"  # ★

    def repr_short(self):
        """
        Returns:
          str: a 5 characters badge that tells whether the job is
          critical, whether it has raised, and where it is
          in the lifecycle.
        """
        if self._detect_support_for_unicode():
            c_state = self._c_saltire if self.is_done() else \
                self._c_circle_arrow if self.is_running() else \
                self._c_black_flag if self.is_scheduled() else \
                self._c_white_flag
            c_crit = self._c_warning if self.critical else " "
            c_boom = self._c_black_star if self.raised_exception() else " "
        else:
            c_state = "x" if self.is_done() else \
                "o" if self.is_running() else \
                "." if self.is_scheduled() else ">"
            c_crit = "!" if self.critical else " "
            c_boom = "*" if self.raised_exception() else " "
        return "{} {} {}".format(c_crit, c_boom, c_state)

    def repr_id(self):
        """
        Returns:
          str: the job's id inside the scheduler, or '??' if not yet set.
        """
        return self._sched_id or '??'

    def repr_main(self):
        """
        Returns:
          str: the job's label, or its :meth:`text_label()`.
        """
        if self.label is not None:
            return self.label
        return self.text_label() or "NOLABEL"

    def repr_result(self):
        """
        Returns:
          str: a short rendering of the job's outcome, if any.
        """
        if not self.is_done():
            return ""
        if self._task.cancelled():
            return "[[cancelled]]"
        exc = self.raised_exception()
        if exc:
            return "!! {}: {} !!".format(type(exc).__name__, exc)
        return "[[ -> {} ]]".format(_shorten(self.result()))

    def repr_requires(self):
        """
        Returns:
          str: the ids of the required jobs, like ``requires={01, 02}``.
        """
        if not self.required:
            return ""
        return "requires={" + ", ".join(job.repr_id()
                                        for job in self.required) + "}"

    def text_label(self):
        """
        Intended to be redefined by daughter classes.

        Returns:
          a one-line string that describes this job, used when the
          instance has no ``label``.
        """
        return None

    def is_idle(self):
        """
        Returns:
          bool: whether the job is idle, i.e. not yet scheduled.
        """
        return self._task is None

    def is_scheduled(self):
        """
        Returns:
          bool: whether the job has been scheduled, and possibly waits
          for a slot in the window.
        """
        return self._task is not None

    def is_running(self):
        """
        Returns:
          bool: whether the job is currently running, or is done.
        """
        return self._running

    def is_done(self):
        """
        Returns:
          bool: whether the job has completed, with or without an exception.
        """
        return self._task is not None and self._task.done()

    def raised_exception(self):
        """
        Returns:
          an exception if the job has completed by raising an exception,
          and None otherwise.
        """
        if not self.is_done() or self._task.cancelled():
            return None
        return self._task.exception()

    def result(self):
        """
        Returns:
          the value returned by the job's ``co_run()``, once done.

        Raises:
          ValueError: if the job is not finished.
        """
        if not self.is_done():
            raise ValueError("job not finished")
        return self._task.result()

    async def co_run(self):
        """
        Abstract virtual - needs to be implemented
        """
        raise NotImplementedError(
            "AbstractJob.co_run() needs to be implemented on class {}"
            .format(self.__class__.__name__))

    def standalone_run(self):
        """
        A convenience helper that just runs this one job on its own.
        """
        with asyncio.Runner() as runner:
            return runner.run(self.co_run())


class Job(AbstractJob):
    """
    The simplest concrete job class, built from a python coroutine.

    Parameters:

      corun: a coroutine to be awaited when the job runs
      kwds: passed to :class:`AbstractJob`
    """

    def __init__(self, corun, **kwds):
        self.corun = corun
        super().__init__(**kwds)

    def text_label(self):
        try:
            return "Job[{} (...)]".format(self.corun.__name__)
        except AttributeError:
            return "Job instance"

    async def co_run(self):
        return await self.corun


class ComputeJob(AbstractJob):
    """
    A job that calls a regular - blocking - python function
    in a worker thread, so that several of them can progress together
    while numpy releases the GIL.

    Parameters:

      function: the callable
      args: positional arguments for ``function``
      kwds: keyword arguments for ``function``, except for the
        ones that :class:`AbstractJob` knows about
        (``critical``, ``label``, ``required``, ``scheduler``)
    """

    _job_keywords = ('critical', 'label', 'required', 'scheduler')

    def __init__(self, function, *args, **kwds):
        job_kwds = {key: kwds.pop(key)
                    for key in self._job_keywords if key in kwds}
        self.function = function
        self.args = args
        self.kwds = kwds
        super().__init__(**job_kwds)

    def text_label(self):
        name = getattr(self.function, '__name__', 'compute')
        return "{}({})".format(name, ", ".join(_shorten(arg)
                                               for arg in self.args))

    async def co_run(self):
        return await asyncio.to_thread(self.function, *self.args, **self.kwds)


def _shorten(value, width=24):
    text = repr(value)
    return text if len(text) <= width else text[:width-3] + "..."
