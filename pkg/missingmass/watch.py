"""
A utility to time-stamp verbose feedback.

Feedback lines are written on ``sys.stderr`` by default, so that
the machine-readable output of the command line tool on ``sys.stdout``
is never polluted by timing information.
"""

import sys
from datetime import datetime


class Watch:
    """
    This class remembers a starting point, so that durations relative
    to that epoch can be shown in feedback instead of a plain timestamp.

    Parameters:
      message(str): printed at creation time, if ``show_elapsed`` is set
      show_elapsed(bool): whether to print a first line at creation time
      stream: where to print, defaults to ``sys.stderr``

    Examples:
      Time a sweep::

        >>> watch = Watch("bound validity sweep", show_elapsed=True)
        000.000  bound validity sweep
        >>> scheduler = Scheduler(watch=watch, verbose=True)
    """

    def __init__(self, message=None, *, show_elapsed=False, stream=None):
        self.stream = stream
        self.start = datetime.now()
        if show_elapsed:
            self.print_elapsed(" {}\n".format(message or ""))

    def _stream(self):
        return self.stream if self.stream is not None else sys.stderr

    def reset(self):
        """
        Use current wall clock as starting point.
        """
        self.start = datetime.now()

    def seconds(self):
        """
        Returns:
          float: time elapsed since start, in seconds.
        """
        return (datetime.now() - self.start).total_seconds()

    def elapsed(self):
        """
        Returns:
          str: seconds elapsed since start, formatted as SSS.MMM
        """
        return "{:07.3f}".format(self.seconds())

    def print_elapsed(self, suffix=" "):
        """
        Print the elapsed time since start in format SSS.MMM + a suffix;
        by default no newline is added.
        """
        print("{} {}".format(self.elapsed(), suffix),
              end="", file=self._stream())

    @staticmethod
    def print_wall_clock(suffix=" ", stream=None):
        """
        Print current time in HH:MM:SS.MMM + a suffix;
        by default no newline is added.
        """
        now = datetime.now()
        millisecond = now.microsecond // 1000
        print("{}.{:03d}{}".format(now.strftime("%H:%M:%S"),
                                   millisecond, suffix),
              end="", file=stream if stream is not None else sys.stderr)
