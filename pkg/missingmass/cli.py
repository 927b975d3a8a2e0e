"""
The ``missingmass`` command line tool.

Each subcommand computes one kind of result and emits it as JSON
(the default), CSV or an aligned text table, on stdout or in a file.

Errors are reported on stderr as ``{"error": code, "message": text}``,
with exit code 2 for usage errors and 1 for domain errors.
"""

import sys
import io
import csv
import json
import math
from argparse import ArgumentParser
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import MissingMassError, UsageError
from .watch import Watch
from .job import Job, ComputeJob
from .scheduler import Scheduler
from .sweep import DEFAULT_CHUNK, default_seed, default_jobs_window
from .distributions import (
    parse_spec, partition_by_threshold, split, absorb, PartitionSpec)
from .missing_mass import (
    missing_mass_stats, expected_missing_mass, exact_deviation_prob,
    mc_deviation_prob, split_condition_margins)
from .bounds import (
    missing_mass_bound, gamma_eps, c_eps, min_sample_size, theta_star,
    optimize_gamma, compensation_gap_bound, crossover,
    UPPER_COMPARATOR, LOWER_COMPARATOR, ComparatorSpec, CSV_COLUMNS)
from .tilt_entropy import FinitePMF, check_partition_monotonicity
from .na_checks import na_monotone_test, FUNCTIONS

FORMATS = ('json', 'csv', 'table')

EXACT_METHOD_LIMIT = 12
"""``verify --method auto`` computes exact probabilities up to that many
bins, and runs Monte-Carlo beyond."""


class _Parser(ArgumentParser):

    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:                                        # pylint: disable=r0902
    """
    Everything a subcommand needs besides its own flags,
    validated before any computation starts.
    """

    command: str
    seed: int
    output_format: str = 'json'
    output_path: str | None = None
    jobs_window: int | None = None
    chunk: int = DEFAULT_CHUNK
    verbose: bool = False
    args: object = field(default=None, repr=False)

    @classmethod
    def from_namespace(cls, namespace):
        """
        Build from parsed arguments, filling seed and jobs window
        from the environment when not given.

        Raises:
          UsageError: on out-of-range settings
        """
        seed = namespace.seed if namespace.seed is not None \
            else default_seed()
        if not 0 <= seed < 2**64:
            raise UsageError("seed must be a 64-bit unsigned integer, got {}"
                             .format(seed))
        jobs = namespace.jobs if namespace.jobs is not None \
            else default_jobs_window()
        if jobs < 0:
            raise UsageError("--jobs must be >= 0, got {}".format(jobs))
        if namespace.chunk < 1:
            raise UsageError("--chunk must be >= 1, got {}"
                             .format(namespace.chunk))
        return cls(command=namespace.command, seed=seed,
                   output_format=namespace.format,
                   output_path=namespace.output, jobs_window=jobs,
                   chunk=namespace.chunk, verbose=namespace.verbose,
                   args=namespace)


@dataclass
class Output:
    """
    What a subcommand produces: a JSON document, and the same content
    as rows for CSV and table output.
    """

    document: object
    rows: list
    columns: tuple


def _float_list(text):
    try:
        return [float(item) for item in text.split(',') if item.strip()]
    except ValueError as exc:
        raise UsageError("bad list of numbers {!r}: {}".format(text, exc))


def _int_list(text):
    try:
        return [int(item) for item in text.split(',') if item.strip()]
    except ValueError as exc:
        raise UsageError("bad list of integers {!r}: {}".format(text, exc))


def _normalize_side(side):
    return 'two_sided' if side == 'two' else side


def _dict_output(document, columns=None):
    columns = columns or tuple(document)
    return Output(document, [document], tuple(columns))


# one function per subcommand
def do_bound(config):                                   # pylint: disable=c0116
    args = config.args
    result = missing_mass_bound(args.epsilon, args.n,
                                _normalize_side(args.side))
    return _dict_output(result.to_dict(), CSV_COLUMNS + ('domain_ok',))


def do_gamma(config):                                   # pylint: disable=c0116
    epsilon = config.args.epsilon
    return _dict_output({
        "epsilon": epsilon,
        "gamma": gamma_eps(epsilon),
        "gamma_optimized": optimize_gamma(epsilon),
        "c": c_eps(epsilon),
        "n_min": min_sample_size(epsilon),
        "theta_star": theta_star(epsilon),
        "gap_bound": compensation_gap_bound(epsilon),
    })


def do_crossover(config):                               # pylint: disable=c0116
    args = config.args
    default = UPPER_COMPARATOR if args.side == 'upper' else LOWER_COMPARATOR
    comparator = default if args.coefficient is None else ComparatorSpec(
        args.coefficient, args.side, "command line")
    return _dict_output({
        "coefficient": comparator.coefficient,
        "side": comparator.side,
        "source_label": comparator.source_label,
        "epsilon_star": crossover(comparator),
    })


def do_stats(config):                                   # pylint: disable=c0116
    args = config.args
    return _dict_output(missing_mass_stats(parse_spec(args.dist),
                                           args.n).to_dict())


def do_exact(config):                                   # pylint: disable=c0116
    args = config.args
    estimate = exact_deviation_prob(parse_spec(args.dist), args.n,
                                    args.epsilon, args.side,
                                    independent=args.independent)
    return _dict_output(estimate.to_dict())


def do_simulate(config):                                # pylint: disable=c0116
    args = config.args
    estimate = mc_deviation_prob(
        parse_spec(args.dist), args.n, args.epsilon, args.side, args.trials,
        config.seed, chunk=config.chunk, jobs_window=config.jobs_window,
        independent=args.independent, verbose=config.verbose)
    return _dict_output(estimate.to_dict())


VERIFY_COLUMNS = ('epsilon', 'n', 'side', 'n_min', 'status', 'method',
                  'probability', 'ci_low', 'ci_high', 'bound', 'holds')


def _verify_point(config, dist, epsilon, n, side, method):  # pylint: disable=r0913
    bound = missing_mass_bound(epsilon, n, side)
    row = dict(epsilon=epsilon, n=n, side=side, n_min=bound.n_min,
               status='skipped', method=None, probability=None,
               ci_low=None, ci_high=None, bound=bound.bound, holds=None)
    if not bound.domain_ok:
        return row
    if method == 'exact':
        estimate = exact_deviation_prob(dist, n, epsilon, side)
        holds = estimate.estimate <= bound.bound + 1e-12
    else:
        estimate = mc_deviation_prob(
            dist, n, epsilon, side, config.args.trials, config.seed,
            chunk=config.chunk, jobs_window=config.jobs_window,
            verbose=config.verbose)
        holds = estimate.ci_low <= bound.bound
    row.update(status='checked', method=estimate.method,
               probability=estimate.estimate, ci_low=estimate.ci_low,
               ci_high=estimate.ci_high, holds=holds)
    return row


async def _co_collect(points):
    return [point.result() for point in points]


def do_verify(config):                                  # pylint: disable=c0116
    args = config.args
    dist = parse_spec(args.dist)
    method = args.method
    if method == 'auto':
        method = 'exact' if dist.size <= EXACT_METHOD_LIMIT else 'mc'
    epsilons = sorted(_float_list(args.epsilon_grid))
    explicit = sorted(_int_list(args.n_grid)) if args.n_grid else None
    sides = sorted(set(args.sides.split(',')))
    for side in sides:
        if side not in ('upper', 'lower'):
            raise UsageError("bad side {!r} in --sides".format(side))
    if args.timeout is not None and not args.timeout > 0:
        raise UsageError("--timeout must be > 0, got {}".format(args.timeout))
    # Monte-Carlo points run their own chunk scheduler, one point at a time
    scheduler = Scheduler(
        jobs_window=1 if method == 'mc' else config.jobs_window,
        timeout=args.timeout, verbose=config.verbose,
        watch=Watch(show_elapsed=True) if config.verbose else None)
    points = []
    for epsilon in epsilons:
        if explicit is not None:
            ns = explicit
        else:
            n_min = min_sample_size(epsilon)
            ns = sorted({n_min, 2 * n_min, 5 * n_min})
        for n in ns:
            for side in sides:
                points.append(ComputeJob(
                    _verify_point, config, dist, epsilon, n, side, method,
                    label="verify eps={} n={} {}".format(epsilon, n, side),
                    scheduler=scheduler))
    collect = Job(_co_collect(points),
                  label="collect {} points".format(len(points)),
                  required=points, scheduler=scheduler)
    try:
        rows = scheduler.run_or_raise(debrief=config.verbose)[-1]
    finally:
        # not awaited if the run was aborted
        collect.corun.close()
    return Output(rows, rows, VERIFY_COLUMNS)


def do_transform(config):                               # pylint: disable=c0116,r0914
    args = config.args
    dist = parse_spec(args.dist)
    theta, n = args.theta, args.n
    partition = partition_by_threshold(dist, theta, n)
    if args.op == 'split':
        result = split(dist, theta, n)
    elif args.op == 'absorb':
        result = absorb(dist, theta, n)
    else:
        result = absorb(split(dist, theta, n), theta, n)
    margins = split_condition_margins(dist, theta, n)
    stats_before = missing_mass_stats(dist, n)
    stats_after = missing_mass_stats(result, n)
    diagnostics = {
        "theta": theta, "n": n, "op": args.op,
        "tau": partition.tau, "tau_prime": partition.tau_prime,
        "below": len(partition.below), "mid": len(partition.mid),
        "above": len(partition.above),
        "size_before": dist.size, "size_after": result.size,
        "mass_before": dist.mass, "mass_after": result.mass,
        "mean_before": stats_before.mean, "mean_after": stats_after.mean,
        "compensation_gap": (expected_missing_mass(result, n)
                             - expected_missing_mass(dist, n)),
        "gap_bound": math.exp(-theta),
        "split_margin_min": min(margins) if margins else None,
        "variance_proxy_after": stats_after.variance_proxy,
        "variance_proxy_bound": theta / n * math.exp(-theta),
    }
    rows = [dict(index=index, label=result.label(index), weight=weight)
            for index, weight in enumerate(result.weights.tolist())]
    return Output({"distribution": result.to_dict(),
                   "diagnostics": diagnostics},
                  rows, ('index', 'label', 'weight'))


def _read_json(path, what):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError("cannot read {} {}: {}".format(what, path, exc))


def do_entropy_check(config):                           # pylint: disable=c0116
    args = config.args
    pmf = FinitePMF.from_dict(_read_json(args.pmf, "pmf"))
    spec = PartitionSpec.from_dict(_read_json(args.partition, "partition"))
    rows = [check_partition_monotonicity(pmf, spec, x).to_dict()
            for x in sorted(_float_list(args.x))]
    columns = ('x', 'entropy_fine', 'entropy_coarse', 'lambda_star',
               'kl_fine', 'kl_coarse', 'chernoff_tail', 'holds',
               'kl_holds', 'chernoff_holds', 'ok')
    return Output(rows[0] if len(rows) == 1 else rows, rows, columns)


def _default_pairs(size):
    pairs = [((i,), (i + 1,)) for i in range(min(size - 1, 10))]
    if size >= 2:
        half = size // 2
        pairs.append((tuple(range(half)), tuple(range(half, size))))
    return pairs


def do_na_check(config):                                # pylint: disable=c0116
    args = config.args
    dist = parse_spec(args.dist)
    if args.set_a is not None or args.set_b is not None:
        pairs = [(tuple(_int_list(args.set_a or "")),
                  tuple(_int_list(args.set_b or "")))]
    else:
        pairs = _default_pairs(dist.size)
    rows = []
    for set_a, set_b in pairs:
        report = na_monotone_test(
            dist, args.n, set_a, set_b, args.f, args.g, args.trials,
            config.seed, chunk=config.chunk,
            jobs_window=config.jobs_window, verbose=config.verbose)
        rows.append(report.to_dict())
    columns = ('set_a', 'set_b', 'f', 'g', 'n', 'trials', 'exact_cov',
               'empirical_cov', 'ci_low', 'ci_high', 'verdict')
    return Output(rows, rows, columns)


COMMANDS = {
    'bound': do_bound,
    'gamma': do_gamma,
    'crossover': do_crossover,
    'stats': do_stats,
    'exact': do_exact,
    'simulate': do_simulate,
    'verify': do_verify,
    'transform': do_transform,
    'entropy-check': do_entropy_check,
    'na-check': do_na_check,
}


def build_parser():                                     # pylint: disable=r0915
    """
    Returns:
      ArgumentParser: the full command line parser
    """
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default='json',
                        help="output format")
    common.add_argument("-o", "--output", default=None,
                        help="write to that file instead of stdout")
    common.add_argument("--seed", type=int, default=None,
                        help="master seed, default $MISSINGMASS_SEED"
                             " or a fixed constant")
    common.add_argument("-j", "--jobs", type=int, default=None,
                        help="max simultaneous Monte-Carlo chunks,"
                             " default $MISSINGMASS_JOBS or the CPU count;"
                             " 0 means no limit")
    common.add_argument("--chunk", type=int, default=DEFAULT_CHUNK,
                        help="number of trials per chunk")
    common.add_argument("-v", "--verbose", action='store_true', default=False,
                        help="progress feedback on stderr")

    parser = _Parser(prog="missingmass",
                     description="Missing-mass deviation bounds, and their"
                                 " numeric verification")
    subparsers = parser.add_subparsers(dest='command', required=True)

    def add(name, help_text):
        return subparsers.add_parser(name, parents=[common], help=help_text)

    def add_dist(sub):
        sub.add_argument("--dist", required=True,
                         help="uniform:N=.., zipf:N=..,s=.., "
                              "geometric:N=..,r=.., spike:N=..,m=..,"
                              " or file:path.json")

    def add_deviation(sub):
        add_dist(sub)
        sub.add_argument("--n", type=int, required=True)
        sub.add_argument("--epsilon", type=float, required=True)
        sub.add_argument("--side", choices=('upper', 'lower'),
                         default='upper')
        sub.add_argument("--independent", action='store_true', default=False,
                         help="independent occupancy indicators")

    sub = add('bound', "evaluate the deviation bound")
    sub.add_argument("--epsilon", type=float, required=True)
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--side", choices=('upper', 'lower', 'two', 'two_sided'),
                     default='upper')

    sub = add('gamma', "optimal gamma, c(eps), n_min and gap bound")
    sub.add_argument("--epsilon", type=float, required=True)

    sub = add('crossover', "where the bound starts beating exp(-a n eps^2)")
    sub.add_argument("--coefficient", type=float, default=None,
                     help="a, defaults to the configured comparator")
    sub.add_argument("--side", choices=('upper', 'lower'), default='upper')

    sub = add('stats', "moments of the missing mass")
    add_dist(sub)
    sub.add_argument("--n", type=int, required=True)

    add_deviation(add('exact', "exact deviation probability"))

    sub = add('simulate', "Monte-Carlo deviation probability")
    add_deviation(sub)
    sub.add_argument("--trials", type=int, default=100_000)

    sub = add('verify', "compare deviation probabilities with the bound")
    add_dist(sub)
    sub.add_argument("--epsilon-grid", default="0.15,0.2,0.3")
    sub.add_argument("--n-grid", default=None,
                     help="comma separated sample sizes,"
                          " default n_min, 2 n_min and 5 n_min")
    sub.add_argument("--sides", default="upper,lower")
    sub.add_argument("--method", choices=('auto', 'exact', 'mc'),
                     default='auto')
    sub.add_argument("--trials", type=int, default=100_000)
    sub.add_argument("--timeout", type=float, default=None,
                     help="give up after that many seconds")

    sub = add('transform', "split and/or absorb a distribution")
    add_dist(sub)
    sub.add_argument("--theta", type=float, required=True)
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--op", choices=('split', 'absorb', 'both'),
                     default='both')

    sub = add('entropy-check', "Chernoff entropy under coarse binning")
    sub.add_argument("--pmf", required=True,
                     help='JSON file {"values": [...], "probs": [...]}')
    sub.add_argument("--partition", required=True,
                     help='JSON file {"groups": [[0, 1], [2]]}')
    sub.add_argument("--x", required=True,
                     help="deviation level(s), comma separated")

    sub = add('na-check', "negative association of multinomial counts")
    add_dist(sub)
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--trials", type=int, default=100_000)
    sub.add_argument("--f", choices=tuple(FUNCTIONS), default='sum')
    sub.add_argument("--g", choices=tuple(FUNCTIONS), default='sum')
    sub.add_argument("--set-a", default=None,
                     help="comma separated bins; default adjacent pairs"
                          " and halves")
    sub.add_argument("--set-b", default=None)
    return parser


def _csv_cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, (list, tuple)):
        return " ".join(str(item) for item in value)
    return str(value)


def _table_cell(value):
    if isinstance(value, float):
        return format(value, ".6g")
    return _csv_cell(value) or "-"


def render(output, output_format):
    """
    Returns:
      str: the output serialized in the given format
    """
    if output_format == 'json':
        return json.dumps(output.document, indent=2,
                          default=_json_default) + "\n"
    if output_format == 'csv':
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(output.columns)
        for row in output.rows:
            writer.writerow([_csv_cell(row.get(column))
                             for column in output.columns])
        return buffer.getvalue()
    cells = [list(output.columns)] + [
        [_table_cell(row.get(column)) for column in output.columns]
        for row in output.rows]
    widths = [max(len(line[k]) for line in cells)
              for k in range(len(output.columns))]
    return "".join(
        "  ".join(cell.rjust(width) for cell, width in zip(line, widths))
        .rstrip() + "\n"
        for line in cells)


def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError("cannot serialize {!r}".format(value))


def run(argv, out=None, err=None):
    """
    Run one command line.

    Parameters:
      argv: the arguments, without the program name
      out: where results go, default ``sys.stdout``
      err: where errors go, default ``sys.stderr``

    Returns:
      int: the exit code
    """
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    try:
        namespace = build_parser().parse_args(argv)
        config = RunConfig.from_namespace(namespace)
        text = render(COMMANDS[config.command](config), config.output_format)
        if config.output_path:
            try:
                Path(config.output_path).write_text(text)
            except OSError as exc:
                raise UsageError("cannot write {}: {}"
                                 .format(config.output_path, exc))
        else:
            out.write(text)
        return 0
    except SystemExit as exc:
        # --help
        return exc.code if isinstance(exc.code, int) else 0
    except MissingMassError as exc:
        err.write(json.dumps(exc.to_dict()) + "\n")
        return 2 if isinstance(exc, UsageError) else 1


def main():                                             # pylint: disable=c0116
    sys.exit(run(sys.argv[1:]))
