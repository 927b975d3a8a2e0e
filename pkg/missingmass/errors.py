"""
Exceptions raised by the missingmass package.

All of them derive from :class:`MissingMassError`, itself a ``ValueError``,
so callers that only care about bad input can catch ``ValueError``.

The command line front end maps :class:`DomainError` to exit code 1
and :class:`UsageError` to exit code 2.
"""


class MissingMassError(ValueError):
    """
    Root of the hierarchy.

    Each subclass is identified by a stable ``code``, which is simply
    its class name, and that is what ends up in error JSON documents.
    """

    @property
    def code(self):                                     # pylint: disable=c0116
        return type(self).__name__

    def to_dict(self):
        """
        Returns:
          dict: a JSON-friendly description of the error.
        """
        return {"error": self.code, "message": str(self)}


class DomainError(MissingMassError):
    """
    An argument lies outside the mathematical domain of the operation.
    """


class UsageError(MissingMassError):
    """
    A malformed command line, SPEC string or input file.
    """


class SchedulingError(MissingMassError):
    """
    A scheduler could not complete: timeout, or a critical job raised.
    """


# distributions
class NonPositiveWeight(DomainError):                   # pylint: disable=c0115
    pass


class SumTooFarFromOne(DomainError):                    # pylint: disable=c0115
    pass


class BadParam(DomainError):                            # pylint: disable=c0115
    pass


class ThetaOutOfRange(DomainError):                     # pylint: disable=c0115
    pass


class NotSplit(DomainError):                            # pylint: disable=c0115
    pass


class NoMidBin(DomainError):                            # pylint: disable=c0115
    pass


class BadPartition(DomainError):                        # pylint: disable=c0115
    pass


# missing mass
class SupportTooLarge(DomainError):                     # pylint: disable=c0115
    pass


# lambert
class LambertDomainError(DomainError):                  # pylint: disable=c0115
    pass


# bounds
class EpsilonOutOfRange(DomainError):                   # pylint: disable=c0115
    pass


class GammaOutOfDomain(DomainError):                    # pylint: disable=c0115
    pass


class NegativeVariance(DomainError):                    # pylint: disable=c0115
    pass


class NoCrossover(DomainError):                         # pylint: disable=c0115
    pass


# tilt / entropy
class XOutsideSupportHull(DomainError):                 # pylint: disable=c0115
    pass


class SupportMismatch(DomainError):                     # pylint: disable=c0115
    pass


# negative association
class IndexOutOfRange(DomainError):                     # pylint: disable=c0115
    pass


class RequiresDistinct(DomainError):                    # pylint: disable=c0115
    pass


class OverlappingSets(DomainError):                     # pylint: disable=c0115
    pass


class UnknownFunction(DomainError):                     # pylint: disable=c0115
    pass
