"""
The Scheduler class is a set of AbstractJobs, that together with their
*required* relationship, form an execution graph.

In this package the jobs are mostly numeric, typically chunks of
Monte-Carlo trials, see :mod:`missingmass.sweep`.
"""

import io
import sys
import time
import asyncio

from .job import AbstractJob
from .window import Window
from .watch import Watch
from .errors import SchedulingError

# pylint settings
# W0212: we have a lot of accesses to protected members of other classes
# R0912 Too many branches
# pylint: disable=w0212, r0912


class Scheduler:                                        # pylint: disable=r0902
    """
    A Scheduler instance is made of a set of AbstractJob objects.

    The purpose of the scheduler object is to orchestrate an execution of
    these jobs that respects the *required* relationships,
    until they are all complete. It starts with the ones that have no
    requirement, and then triggers the other ones as their requirement
    jobs complete.

    For this reason, the dependency/requirements graph **must be acyclic**.

    Parameters:
      jobs: instances of `AbstractJob`; order only matters for listings.
      jobs_window: is an integer that specifies how many jobs
        can be run simultaneously. None or 0 means no limit.
      timeout: can be an `int` or `float` and is expressed
        in seconds; it applies to the overall orchestration.
        None means no timeout.
      watch: if the caller passes a :class:`~missingmass.watch.Watch`
        instance, it is used in feedback messages to show the time
        elapsed wrt that watch, instead of using the wall clock.
      verbose (bool): flag that says if execution should be verbose;
        feedback goes to ``sys.stderr``.

    Examples:
      Two chunks and a merge step that requires both::

        s = Scheduler(jobs_window=2)
        a = ComputeJob(count_events, 10_000, rng1, scheduler=s)
        b = ComputeJob(count_events, 10_000, rng2, scheduler=s)
        Job(co_merge(a, b), required=(a, b), scheduler=s)
        s.run()
    """

    def __init__(self, *jobs,
                 jobs_window=None, timeout=None,
                 watch=None, verbose=False):
        self.jobs = []
        self.update(jobs)
        self.jobs_window = jobs_window
        self.timeout = timeout
        self.watch = watch
        self.verbose = verbose
        self._failed_critical = False
        # False, or the initial timeout
        self._failed_timeout = False
        self._expiration = None

    # think of a scheduler as a set of jobs
    def update(self, jobs):
        """
        Adds a collection of jobs; this method is named after ``set.update()``.

        Returns:
          self: the scheduler object, for cascading insertions if needed.
        """
        for job in jobs:
            if job not in self.jobs:
                self.jobs.append(job)
        return self

    def add(self, job):
        """
        Adds a single job.

        Returns:
          job: the job object, for convenience.
        """
        self.update([job])
        return job

    def __len__(self):
        return len(self.jobs)

    def __iter__(self):
        return iter(self.jobs)

    def failed_time_out(self):
        """
        Returns:
          bool: True if and only if :meth:`co_run()`
          has failed because of a time out.
        """
        return self._failed_timeout

    def failed_critical(self):
        """
        Returns:
          bool: True if and only if :meth:`co_run()`
          has failed because a critical job has raised an exception.
        """
        return self._failed_critical

    def why(self):
        """
        Returns:
          str: a message explaining why :meth:`co_run()` has failed,
          or ``"FINE"`` if it has not failed.
        """
        if self._failed_timeout:
            return "TIMED OUT after {}s".format(self._failed_timeout)
        if self._failed_critical:
            return "a CRITICAL job has raised an exception"
        return "FINE"

    ####################
    def check_cycles(self):
        """
        Performs a minimal sanity check, primarily for cycles.

        Returns:
            bool: True if the topology is fine
        """
        try:
            for _ in self.topological_order():
                pass
            return True
        except SchedulingError as exc:
            if self.verbose:
                print("check_cycles failed", exc, file=sys.stderr)
            return False

    def topological_order(self):
        """
        A generator function that scans the graph in topological order,
        i.e. starting from jobs that have no dependencies, and moving forward.

        Beware that this is not a separate iterator, so it can't be nested.

        Raises:
          SchedulingError: if the graph has a cycle, or requires
            jobs that are not part of the scheduler.
        """
        for job in self.jobs:
            job._s_mark = None
        nb_marked = 0
        target_marked = len(self.jobs)

        while nb_marked < target_marked:
            changed = False
            for job in self.jobs:
                if job._s_mark:
                    continue
                if all(req._s_mark for req in job.required):
                    job._s_mark = True
                    nb_marked += 1
                    changed = True
                    yield job
            if not changed:
                raise SchedulingError(
                    "scheduler could not be scanned, {} jobs unreachable"
                    " - most likely because of cycles"
                    .format(target_marked - nb_marked))

    def entry_jobs(self):
        """
        A generator that yields all jobs that have no requirement.
        """
        for job in self.jobs:
            if not job.required:
                yield job

    ####################
    def _backlinks(self):
        """
        initialize Job._s_successors on all jobs
        as the reverse of Job.required
        """
        for job in self.jobs:
            job._s_successors = []
        for job in self.jobs:
            for req in job.required:
                req._s_successors.append(job)

    def _reset_tasks(self):
        """
        In case one tries to run the same scheduler twice
        """
        for job in self.jobs:
            job._task = None
            job._running = False

    def _set_sched_ids(self):
        # how many chars do we need to represent all jobs
        total = len(self.jobs)
        width = len(str(total))
        id_format = "{{:0{w}d}}".format(w=width)
        for index, job in enumerate(self.topological_order(), 1):
            job._set_sched_id(index, id_format)

    def _create_task(self, job, window):
        """
        this is the hook that lets us make sure the created Task objects
        have a backlink reference to their corresponding job
        """
        # the decorated object is a coroutine function that needs to be CALLED
        task = asyncio.create_task(window.run_job(job)())
        task._job = job
        job._task = task
        return task

    def _record_beginning(self):
        self._expiration = \
            None if self.timeout is None \
            else time.time() + self.timeout

    def _remaining_timeout(self):
        return \
            None if self._expiration is None \
            else max(0., self._expiration - time.time())

    @staticmethod
    async def _tidy_tasks(pending):
        """
        cancel the tasks that have not completed and wait for them
        """
        if pending:
            for task in pending:
                task.cancel()
            await asyncio.wait(pending)

    def _feedback(self, jobs, state, force=False):
        """
        When self.verbose is set, provide feedback about the mentioned
        jobs having reached this state;
        if jobs is None, then state is a message to be shown as-is
        """
        if not force and not self.verbose:
            return

        def print_time():                               # pylint: disable=c0111
            if self.watch is not None:
                self.watch.print_elapsed()
            else:
                Watch.print_wall_clock()
        if jobs is None:
            print_time()
            print("SCHEDULER {}: {}".format(self.stats(), state),
                  file=sys.stderr)
            return
        for job in jobs:
            if not isinstance(job, AbstractJob):
                job = job._job
            print_time()
            print("{} {:8s}: {} {} {} {}"
                  .format(self.stats(), state,
                          job.repr_id(), job.repr_short(), job.repr_main(),
                          job.repr_result()),
                  file=sys.stderr)

    ####################
    def run(self):
        """
        A synchronous wrapper around :meth:`co_run()`,
        please refer to that link for details on the return value.
        """
        with asyncio.Runner() as runner:
            return runner.run(self.co_run())

    async def co_run(self):
        """
        The primary entry point for running a scheduler.

        Runs member jobs (that is, schedule their `co_run()` method)
        in an order that satisfies their *required* relationship.

        Proceeds to the end no matter what, except if either:

        * one critical job raises an exception, or
        * a timeout occurs.

        Returns:
          bool: `True` if none of these 2 conditions occur, `False` otherwise.
        """
        window = Window(self.jobs_window)
        self._set_sched_ids()
        self._backlinks()
        self._reset_tasks()
        self._record_beginning()
        self._failed_critical = False
        self._failed_timeout = False

        if not self.jobs:
            return True

        nb_jobs = len(self.jobs)
        nb_jobs_done = 0
        entry_jobs = list(self.entry_jobs())

        self._feedback(None, "entering co_run() with {} jobs"
                       .format(nb_jobs))
        self._feedback(entry_jobs, "STARTING")
        pending = {self._create_task(job, window) for job in entry_jobs}

        while True:
            done, pending \
                = await asyncio.wait(pending,
                                     timeout=self._remaining_timeout(),
                                     return_when=asyncio.FIRST_COMPLETED)

            # the only condition where we have nothing in done is
            # because a timeout occurred
            if not done:
                self._feedback(None, "TIMEOUT occurred")
                self._feedback(pending, "ABORTING")
                await self._tidy_tasks(pending)
                self._failed_timeout = self.timeout
                return False

            done_ok = [t for t in done if t.exception() is None]
            done_ko = [t for t in done if t.exception() is not None]
            self._feedback(done_ok, "DONE")
            self._feedback(done_ko, "RAISED EXC.")

            if any(task._job.critical for task in done_ko):
                await self._tidy_tasks(pending)
                self._failed_critical = True
                self._feedback(
                    None, "Emergency exit upon exception in critical job")
                return False

            nb_jobs_done += len(done)
            if nb_jobs_done == nb_jobs:
                return True

            # only consider the jobs right behind the ones that just finished
            for done_task in done:
                for candidate in done_task._job._s_successors:
                    if candidate.is_scheduled():
                        continue
                    if all(req.is_done() for req in candidate.required):
                        self._feedback([candidate], "STARTING")
                        pending.add(self._create_task(candidate, window))

    def run_or_raise(self, debrief=False):
        """
        Like :meth:`run()`, but a failed orchestration raises instead of
        returning False: the exception of the first critical job that
        raised (in topological order) is re-raised as-is, and a timeout
        turns into :class:`~missingmass.errors.SchedulingError`.

        Parameters:
          debrief: if set, a failed run is first reported
            with :meth:`debrief()` on stderr.

        Returns:
          list: the results of all jobs, in insertion order.
        """
        if self.run():
            return [job.result() for job in self.jobs]
        if debrief:
            self.debrief()
        if self._failed_critical:
            for job in self.topological_order():
                exc = job.raised_exception()
                if exc is not None and job.critical:
                    raise exc
        raise SchedulingError("scheduler failed: {}".format(self.why()))

    ####################
    def list(self, stream=None):
        """
        Prints the jobs in topological order, with their status
        summarized with a few signs, and their requirements.
        """
        stream = stream if stream is not None else sys.stderr
        self._set_sched_ids()
        for job in self.topological_order():
            print("{} {} {} {} {}"
                  .format(job.repr_id(), job.repr_short(), job.repr_main(),
                          job.repr_result(), job.repr_requires()),
                  file=stream)

    def _stats(self):
        done = sum(1 for j in self.jobs if j.is_done())
        running = sum(1 for j in self.jobs if j.is_running())
        return (done, running - done, len(self.jobs) - running,
                len(self.jobs))

    def __repr__(self):
        done, ongoing, idle, total = self._stats()
        return ("{type} with {done} done + {ongoing} ongoing"
                " + {idle} idle = {total} job(s)"
                .format(type=type(self).__name__,
                        done=done, ongoing=ongoing, idle=idle, total=total))

    def stats(self):
        """
        Returns a string like e.g. ``2D + 3R + 4I = 9`` meaning that
        the scheduler currently has 2 done, 3 running an 4 idle jobs
        """
        done, ongoing, idle, total = self._stats()
        return ("{done}D + {ongoing}R + {idle}I = {total}"
                .format(done=done, ongoing=ongoing, idle=idle, total=total))

    def debrief(self, stream=None):
        """
        Designed for schedulers that have failed to orchestrate.

        Print a complete report, that includes `list()` and the
        exceptions raised by jobs, critical ones first.
        """
        stream = stream if stream is not None else sys.stderr
        print(5 * '-', self.why(), file=stream)
        self.list(stream)
        exceptions = [j for j in self.jobs if j.raised_exception()]
        if not exceptions:
            return
        print("===== {} job(s) with an exception, including {} critical"
              .format(len(exceptions),
                      sum(1 for j in exceptions if j.critical)),
              file=stream)
        for job in sorted(exceptions, key=lambda j: not j.critical):
            buffer = io.StringIO()
            job._task.print_stack(file=buffer)
            print("{} {}: {!r}".format(job.repr_id(), job.repr_main(),
                                       job.raised_exception()),
                  file=stream)
            print(buffer.getvalue(), end="", file=stream)
