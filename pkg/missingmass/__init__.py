"""
the missingmass package

Concentration bounds for the missing mass of an i.i.d. sample,
and the numeric machinery to check them.
"""

from .version import __version__

from .errors import MissingMassError, DomainError, UsageError, SchedulingError
from .job import AbstractJob, Job, ComputeJob
from .scheduler import Scheduler
from .watch import Watch
from .distributions import (
    DiscreteDistribution, ThresholdPartition, PartitionSpec,
    make_distribution, make_family, partition_by_threshold,
    split, absorb, coarse_bin, parse_spec, load_distribution)
from .missing_mass import (
    MissingMassStats, DeviationEstimate,
    expected_missing_mass, missing_mass_stats, exact_distribution,
    exact_deviation_prob, sample_missing_mass, mc_deviation_prob)
from .lambert import WResult, lambert_w_minus1
from .bounds import (
    BoundResult, ComparatorSpec, UPPER_COMPARATOR, LOWER_COMPARATOR,
    gamma_eps, c_eps, c_general, optimize_gamma, missing_mass_bound,
    min_sample_size, compensation_gap_bound, bernstein_bound,
    variance_proxy_bound, crossover)
from .tilt_entropy import (
    FinitePMF, log_mgf, chernoff_entropy, tilt, kl,
    check_partition_monotonicity)
from .na_checks import (
    NAReport, occupancy_cov_exact, count_cov_exact, na_monotone_test)
