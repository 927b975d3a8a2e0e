"""
Implementation for the Window class, for schedulers
with a limited number of running jobs
"""

import asyncio


class Window:
    """
    The window class throttles a scheduler so that only a limited
    number of jobs run simultaneously; with numeric chunks this bounds
    both the number of busy worker threads and the peak memory,
    as each chunk allocates its own trial matrix.

    Users are not expected to create such objects by themselves,
    the scheduler takes care of that.

    Parameters:
      jobs_window: an int, None or 0 meaning no limit
    """

    def __init__(self, jobs_window):
        if jobs_window is None:
            jobs_window = 0
        if jobs_window < 0:
            raise ValueError("jobs_window must be non-negative, got {}"
                             .format(jobs_window))
        self.jobs_window = jobs_window
        self.queue = asyncio.Queue(maxsize=jobs_window)

    def run_job(self, job):
        """
        a decorator around a job's coroutine,
        that will first get a slot in the queue

        REMEMBER that this object will need to be CALLED to become
        a coroutine itself
        """
        async def wrapped():                            # pylint: disable=C0111
            # put anything to take a slot in the queue
            await self.queue.put(1)
            job._running = True                         # pylint: disable=w0212
            try:
                return await job.co_run()
            finally:
                # release slot even if the job raised
                await self.queue.get()
        return wrapped

    def busy(self):
        """
        Returns:
          int: the number of slots currently taken.
        """
        return self.queue.qsize()
