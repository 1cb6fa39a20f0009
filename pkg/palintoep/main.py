"""Palintoep entrypoint"""

import sys
from argparse import ArgumentParser, Namespace
from logging import DEBUG, WARNING
from pathlib import Path
from time import perf_counter

from . import (
    COMMAND_CONFIGURATIONS,
    COMMAND_DIAGNOSE,
    COMMAND_EXACT,
    COMMAND_EXTRAPOLATE,
    COMMAND_FORMULAS,
    COMMAND_SIMULATE,
    COMMAND_VALIDATE,
    EXIT_CONFIG,
    EXIT_GUARD,
    EXIT_NUMERICAL,
    EXIT_OK,
)
from .config import RunConfig, parse_config, read_document
from .ensemble import DISTRIBUTIONS, get_distribution
from .estimation import (
    moment_table,
    odd_moment_report,
    read_moment_table,
    run_ensemble,
    tail_comparison,
    variance_report,
    write_moment_table,
)
from .helper import (
    ConfigError,
    ConvergenceError,
    DimensionError,
    FitError,
    GuardError,
    dump_json,
)
from .helper.logging import LOGGER
from .matchings import (
    OffsetFilter,
    configuration_contribution,
    enumerate_pair_matchings,
    exact_expected_moment,
)
from .report import (
    OutputFiles,
    ReportDocument,
    configuration_rows,
    fit_even_moments,
    formula_rows,
)
from .spectra import histogram, write_histogram

_FLAG_KEYS = {
    'n': 'n',
    'N': 'N',
    'sims': 'num_matrices',
    'k': 'max_moment',
    'dist': 'distribution',
    'seed': 'seed',
    'method': 'method',
    'order': 'fit_order',
}


def _emit(document, out: Path | None):
    """JSON to --out, or to stdout when no path is given."""
    text = dump_json(document, out)
    if out is None:
        sys.stdout.write(text)


def _run_config(args: Namespace) -> RunConfig:
    """Config file (if any) overridden by explicit flags."""
    document = read_document(args.config) if args.config else {}
    document.setdefault('schema_version', 1)
    for flag, key in _FLAG_KEYS.items():
        value = getattr(args, flag, None)
        if value is not None:
            document[key] = value
    if getattr(args, 'weighted', False):
        document['weighted'] = True
    return parse_config(document)


def _single(args: Namespace, config_key: str, flag: str):
    value = getattr(args, flag, None)
    if value is None and args.config:
        value = read_document(args.config).get(config_key)
    if value is None:
        raise ConfigError([f"--{flag} is required"])
    return value


def _validate(args: Namespace):
    config = _run_config(args)
    LOGGER.info(
        f"Configuration is valid: n={config.n}, N={list(config.sizes)}"
    )


def _simulate(args: Namespace):
    config = _run_config(args)
    outputs = config.outputs.under(args.out) if args.out else config.outputs
    runs, histograms = [], {}
    with OutputFiles() as files:
        for spec, count in zip(config.specs(), config.num_matrices):
            run = run_ensemble(
                spec,
                count,
                config.max_moment,
                config.method,
                keep_eigenvalues=config.histogram is not None,
            )
            runs.append(run)
            if config.histogram is not None:
                settings = config.histogram
                directory = outputs.histograms or outputs.moments.parent
                path = files.add(directory / f"histogram_N{spec.N}.csv")
                hist = histogram(
                    run.eigenvalues,
                    settings.bins,
                    (settings.low, settings.high),
                )
                write_histogram(hist, path)
                histograms[spec.N] = (path, hist)
        table = moment_table(runs)
        write_moment_table(table, files.add(outputs.moments))
        LOGGER.info(f"Moment table written to {outputs.moments}")
        if outputs.report is not None:
            fits = {}
            if config.fit_order is not None:
                fits = fit_even_moments(
                    table, config.fit_order, config.weighted
                )
            report = ReportDocument(
                config.document, table, fits, histograms=histograms
            )
            report.write(files.add(outputs.report))
            LOGGER.info(f"Report written to {outputs.report}")


def _exact(args: Namespace):
    n = _single(args, 'n', 'n')
    sizes = _single(args, 'N', 'N')
    k = _single(args, 'max_moment', 'k')
    if len(sizes) != 1:
        raise ConfigError([f"exact takes a single N, got {sizes}"])
    N = sizes[0]
    name = args.dist or 'gaussian'
    value = exact_expected_moment(N, n, k, get_distribution(name))
    _emit(
        {'N': N, 'n': n, 'k': k, 'distribution': name, 'value': value},
        args.out,
    )


def _formulas(args: Namespace):
    _emit(formula_rows(args.m, args.n), args.out)


def _extrapolate(args: Namespace):
    table = read_moment_table(args.input)
    fit = table.fit(args.k, args.order, args.weighted)
    _emit({'moment': args.k, **fit.to_dict()}, args.out)


def _configurations(args: Namespace):
    n = _single(args, 'n', 'n')
    sizes = _single(args, 'N', 'N')
    size = 2 * args.m
    offset_filter = None
    if args.offset is not None:
        offset_filter = OffsetFilter(args.offset, args.crossing)
    matchings = enumerate_pair_matchings(size)
    reports = []
    # largest N first so an oversized request fails before any work
    for N in sorted(sizes, reverse=True):
        for matching in matchings:
            reports.append(
                configuration_contribution(N, n, matching, offset_filter)
            )
    _emit(
        {
            'n': n,
            'moment': size,
            'N': sorted(sizes),
            'matchings': configuration_rows(reports),
        },
        args.out,
    )


def _diagnose(args: Namespace):
    config = _run_config(args)
    runs = [
        run_ensemble(spec, count, config.max_moment, config.method, True)
        for spec, count in zip(config.specs(), config.num_matrices)
    ]
    orders = range(1, config.max_moment + 1)
    _emit(
        {
            'n': config.n,
            'N': list(config.sizes),
            'variance': [
                variance_report(runs, k).to_dict()
                for k in orders
                if k % 2 == 0
            ],
            'odd_moments': [
                odd_moment_report(runs, k).to_dict() for k in orders if k % 2
            ],
            'tails': [
                {'N': run.spec.N, **_tail(run.eigenvalues, args.bound)}
                for run in runs
            ],
        },
        args.out,
    )


def _tail(pool, bound: float) -> dict:
    comparison = tail_comparison(pool, bound)
    return {
        'bound': comparison.bound,
        'observed': comparison.observed,
        'gaussian': comparison.gaussian,
        'stderr': comparison.stderr,
    }


_COMMAND_STRATEGY = {
    COMMAND_VALIDATE: _validate,
    COMMAND_SIMULATE: _simulate,
    COMMAND_EXACT: _exact,
    COMMAND_FORMULAS: _formulas,
    COMMAND_EXTRAPOLATE: _extrapolate,
    COMMAND_CONFIGURATIONS: _configurations,
    COMMAND_DIAGNOSE: _diagnose,
}


def init_parser(argv: list[str] | None = None) -> Namespace:
    """Init argv parser"""
    common = ArgumentParser(add_help=False)
    common.add_argument('--config', type=Path, help='JSON run configuration')
    common.add_argument('--out', type=Path, help='output file or directory')
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true')
    verbosity.add_argument('-q', '--quiet', action='store_true')

    ensemble = ArgumentParser(add_help=False)
    ensemble.add_argument('--n', type=int, help='palindromicity degree')
    ensemble.add_argument(
        '--N', type=int, nargs='+', help='matrix dimensions'
    )
    ensemble.add_argument('--k', type=int, help='maximum moment order')
    ensemble.add_argument('--dist', choices=DISTRIBUTIONS)

    runs = ArgumentParser(add_help=False)
    runs.add_argument('--sims', type=int, help='matrices per dimension')
    runs.add_argument('--seed', type=int)
    runs.add_argument('--method', choices=('eigenvalues', 'trace'))

    parser = ArgumentParser(
        description="Spectral laboratory for highly palindromic Toeplitz "
        "matrices"
    )
    commands = parser.add_subparsers(dest='command', required=True)
    commands.add_parser(
        COMMAND_VALIDATE,
        parents=[common, ensemble, runs],
        help='check a run configuration',
    )
    simulate = commands.add_parser(
        COMMAND_SIMULATE,
        parents=[common, ensemble, runs],
        help='Monte Carlo moment table',
    )
    simulate.add_argument('--order', type=int, help='extrapolation order')
    simulate.add_argument('--weighted', action='store_true')
    commands.add_parser(
        COMMAND_EXACT,
        parents=[common, ensemble],
        help='exact expected moment by enumeration',
    )
    formulas = commands.add_parser(
        COMMAND_FORMULAS, parents=[common], help='closed-form moments'
    )
    formulas.add_argument('--m', type=int, nargs='+', default=[2, 3, 4, 5])
    formulas.add_argument('--n', type=int, nargs='+', default=[0, 1, 2, 3])
    extrapolate = commands.add_parser(
        COMMAND_EXTRAPOLATE,
        parents=[common],
        help='fit the 1/N model to a moment table',
    )
    extrapolate.add_argument('input', type=Path, help='moment table CSV')
    extrapolate.add_argument('--k', type=int, default=4)
    extrapolate.add_argument('--order', type=int)
    extrapolate.add_argument('--weighted', action='store_true')
    configurations = commands.add_parser(
        COMMAND_CONFIGURATIONS,
        parents=[common],
        help='per-matching contributions',
    )
    configurations.add_argument('--n', type=int)
    configurations.add_argument('--N', type=int, nargs='+')
    configurations.add_argument(
        '--m', type=int, default=2, help='number of pairs'
    )
    configurations.add_argument(
        '--offset', type=int, help='keep tuples with k = i + cN/2^n'
    )
    configurations.add_argument('--crossing', action='store_true')
    diagnose = commands.add_parser(
        COMMAND_DIAGNOSE,
        parents=[common, ensemble, runs],
        help='variance, odd moment and tail diagnostics',
    )
    diagnose.add_argument('--bound', type=float, default=2.5)
    return parser.parse_args(argv)


def app(argv: list[str] | None = None) -> int:
    """Application entrypoint"""
    args = init_parser(argv)
    if args.verbose:
        LOGGER.setLevel(DEBUG)
    elif args.quiet:
        LOGGER.setLevel(WARNING)

    started = perf_counter()
    try:
        _COMMAND_STRATEGY[args.command](args)
    except ConfigError as exc:
        for violation in exc.violations:
            LOGGER.error(violation)
        return EXIT_CONFIG
    except (DimensionError, ValueError) as exc:
        LOGGER.error(str(exc))
        return EXIT_CONFIG
    except OSError as exc:
        LOGGER.error(f"{exc.filename}: {exc.strerror}")
        return EXIT_CONFIG
    except GuardError as exc:
        LOGGER.error(str(exc))
        return EXIT_GUARD
    except (ConvergenceError, FitError) as exc:
        LOGGER.error(str(exc))
        return EXIT_NUMERICAL
    LOGGER.info(f"{args.command} done in {perf_counter() - started:.2f}s")
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(app())
