# -*- coding: utf-8 -*-
# cython: language_level=3
# Copyright (c) 2023-present the kakeya-lab developers
#
# Permission is hereby granted, free of charge, to any person obtaining a copy
# of this software and associated documentation files (the "Software"), to deal
# in the Software without restriction, including without limitation the rights
# to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
# copies of the Software, and to permit persons to whom the Software is
# furnished to do so, subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included in all
# copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
# AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
# LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
# OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
# SOFTWARE

"""The ``kakeya-lab`` command line.

Exit status is 0 when every requested check passes, 2 when a check fails (the failures are
printed to stdout as a JSON list) and 1 for usage or input/output errors.
"""
import argparse
import json
import logging
import math
import os
import sys
from typing import Any, Callable, Sequence

from attrs import evolve

from ..errors import ConfigError, KakeyaError, ToleranceError
from ..filters import BAND_COLUMNS, FilterBank, band_field, band_table, build_dictionary
from ..flags import Suites
from ..grid import GridShape, export_csv, read_field, write_field
from ..interface import print_banner, start_logging
from ..maximal import (
    DirectionSet,
    hl_maximal,
    hl_maximal_r,
    kakeya_maximal,
    nikodym_maximal,
    smoothed_frozen_t,
    smoothed_kakeya,
)
from ..pool import resolve_threads
from ..testsets import KINDS, TestSpec, describe, write_manifest
from ..utils import ensure_dir, write_csv, write_json
from ..verify import OPERATORS, SUITE_NAMES, SWEEP_COLUMNS, norm_ratio_sweep, run_suite, smoothing_context
from .config import Parameters, RunConfig, write_version
from .report import write_report

__all__ = ['main', 'build_parser', 'EXIT_OK', 'EXIT_USAGE', 'EXIT_FAILED']

_log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILED = 2

MAXIMAL_OPERATORS = ('kakeya', 'nikodym', 'hl', 'smoothed', 'frozen')
TUBE_KINDS = ('tube', 'tube_union', 'perron_tree')

DEFAULTS = Parameters()

Failures = list[dict[str, Any]]


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f'{self.prog}: error: {message}\n')


# shared plumbing


def _parameters(args: argparse.Namespace, **overrides: Any) -> Parameters:
    params = Parameters.from_json(args.params) if args.params else Parameters()
    chosen = {key: value for key, value in overrides.items() if value is not None}
    if not chosen:
        return params
    try:
        return evolve(params, **chosen)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f'invalid option: {exc}') from exc


def _prepare(
    args: argparse.Namespace,
    params: Parameters,
    *,
    inputs: Sequence[str] = (),
    **options: Any,
) -> str:
    """Create the output directory and record the resolved configuration in it."""
    out = ensure_dir(args.out)
    config = RunConfig(args.command, params, inputs, out, args.seed, args.threads, options)
    config.to_json(os.path.join(out, 'config.json'))
    write_version(os.path.join(out, 'version.json'))
    return out


def _grid(params: Parameters, length: float) -> GridShape:
    return GridShape(params.dim, params.samples, length)


# subcommands


def _filters(args: argparse.Namespace) -> Failures:
    params = _parameters(args, delta=args.delta, eps=args.eps)
    out = _prepare(args, params, bold=args.bold, dump=args.dump)
    bank = FilterBank(params.delta, params.eps, _grid(params, params.kernel_length))

    rows = band_table(bank, bold=args.bold)
    write_csv(os.path.join(out, 'filters.csv'), BAND_COLUMNS, [row.as_tuple() for row in rows])
    if args.dump:
        kernels = ensure_dir(os.path.join(out, 'kernels'))
        for row in rows:
            family = row.family.removeprefix('bold_')
            write_field(os.path.join(kernels, f'{row.family}-{row.k}.field'), band_field(bank, family, row.k, bold=args.bold))
    _log.info(f'wrote {len(rows)} bands to {out!r}')
    return []


def _testset(args: argparse.Namespace) -> Failures:
    params = _parameters(args)
    length = args.length
    if length is None:
        length = params.tube_length if args.kind in TUBE_KINDS else params.kernel_length
    options = {
        'kind': args.kind,
        'count': args.count,
        'delta': args.delta,
        'radius': args.radius,
        'levels': args.levels,
        'cutoff': args.cutoff,
        'length': length,
        'repeat': args.repeat,
    }
    out = _prepare(args, params, **options)
    grid = _grid(params, length)

    entries = []
    for seed in range(args.seed, args.seed + args.repeat):
        spec = TestSpec(args.kind, seed, args.delta, args.radius, args.count, args.levels, args.cutoff)
        sample = spec.generate(grid)
        name = f'{args.kind}-{seed}.field'
        write_field(os.path.join(out, name), sample)
        entries.append({'file': name, **describe(spec, sample)})
    write_manifest(os.path.join(out, 'manifest.json'), entries)
    _log.info(f'wrote {len(entries)} {args.kind} fields to {out!r}')
    return []


def _maximal(args: argparse.Namespace) -> Failures:
    params = _parameters(args, delta=args.delta, eps=args.eps)
    options = {'op': args.op, 'dirs': args.dirs, 't': args.t, 'r': args.r, 'csv': args.csv}
    out = _prepare(args, params, inputs=[args.input], **options)
    f = read_field(args.input)
    if f.dim != params.dim:
        raise ConfigError(f'{args.input!r} is {f.dim} dimensional, the parameters ask for {params.dim}')
    delta = params.delta

    if args.op == 'kakeya':
        directions = DirectionSet.for_delta(f.dim, delta, args.dirs)
        values = kakeya_maximal(f, delta, directions)
        header = [f'omega_{axis}' for axis in range(f.dim)] + ['weight', 'value']
        rows = [(*omega, weight, value) for omega, weight, value in zip(directions.directions, directions.weights, values)]
        write_csv(os.path.join(out, 'kakeya.csv'), header, rows)
        return []

    if args.op == 'nikodym':
        result = nikodym_maximal(f, delta, DirectionSet.for_delta(f.dim, delta, args.dirs))
    elif args.op == 'hl':
        result = hl_maximal(f) if args.r is None else hl_maximal_r(f, args.r)
    else:
        settings = params.sweep_settings(threads=args.threads)
        bank, rotations, t_grid = smoothing_context(delta, f.grid, settings)
        dictionary = build_dictionary(f.dim, params.members, normalization=params.normalization)
        if args.op == 'frozen':
            t = delta**-params.eps if args.t is None else args.t
            result = smoothed_frozen_t(f, bank, dictionary, rotations, t)
        else:
            result = smoothed_kakeya(f, bank, dictionary, rotations, t_grid)

    write_field(os.path.join(out, f'{args.op}.field'), result)
    if args.csv:
        export_csv(os.path.join(out, f'{args.op}.csv'), result)
    return []


def _suite_document(summary: dict[str, Any], passed: bool, failures: Failures) -> dict[str, Any]:
    return {**summary, 'passed': passed, 'failures': failures}


def _verify(args: argparse.Namespace) -> Failures:
    params = _parameters(args)
    suites = Suites(**{name: True for name in args.suite})
    out = _prepare(args, params, suites=list(suites))

    failures: Failures = []
    for name in suites:
        result = run_suite(name, params, args.threads)
        write_csv(os.path.join(out, f'{name}.csv'), result.columns, result.rows)
        write_json(os.path.join(out, f'{name}.json'), _suite_document(result.summary, result.passed, result.failures))
        failures.extend({'suite': name, **failure} for failure in result.failures)
    return failures


def _sweep(args: argparse.Namespace) -> Failures:
    params = _parameters(args, deltas=args.deltas, p=args.p, q=args.q, eps=args.eps, r=args.r)
    out = _prepare(args, params, op=args.op, family=args.family, t=args.t)
    if len(params.deltas) < 3:
        raise ConfigError(f'need >= 3 points for an exponent fit, got {len(params.deltas)} delta values')

    settings = params.sweep_settings(threads=args.threads, t=args.t)
    spec = params.family_spec(args.family, args.seed)
    report = norm_ratio_sweep(args.op, spec, params.deltas, params.p, params.q, settings)

    failures: Failures = []
    if not report.passed:
        failures.append({'suite': 'sweep', 'reason': 'exponent above bound', **report.summary()})
    elif not report.within_trivial_bounds:
        failures.append({'suite': 'sweep', 'reason': 'exponent outside trivial bounds', **report.summary()})

    stem = os.path.join(out, f'{args.op}-{args.family}')
    write_csv(f'{stem}.csv', SWEEP_COLUMNS, [row.as_tuple() for row in report.rows])
    write_json(f'{stem}.json', _suite_document(report.summary(), not failures, failures))
    return failures


def _report(args: argparse.Namespace) -> Failures:
    params = _parameters(args)
    out = _prepare(args, params, inputs=args.csv)
    written = write_report(args.csv, out)
    _log.info(f'wrote {len(written)} report files to {out!r}')
    return []


# parser


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f'expected a positive integer, got {text}')
    return value


def _number(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f'expected a finite number, got {text}')
    return value


def _common(parser: argparse.ArgumentParser, out: str) -> None:
    parser.add_argument('--params', metavar='JSON', help='parameter block overlaid on the defaults')
    parser.add_argument('--out', default=out, help='output directory (default: %(default)s)')
    parser.add_argument('--seed', type=int, default=0, help='seed of generated inputs (default: %(default)s)')


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog='kakeya-lab', description='Kakeya and Nikodym maximal operators on discrete tori.')
    parser.add_argument('--version', action='store_true', help='print the banner and exit')
    parser.add_argument('--log-level', choices=('DEBUG', 'INFO', 'WARNING', 'ERROR'), help='console log level')
    parser.add_argument('--debug', action='store_true', help='shorthand for --log-level DEBUG')
    parser.add_argument(
        '--threads', type=_positive_int, help='worker threads (default: 1, overridden by KAKEYA_LAB_THREADS)'
    )
    commands = parser.add_subparsers(dest='command', metavar='COMMAND', parser_class=_Parser)

    filters = commands.add_parser('filters', help='tabulate Littlewood-Paley bands')
    _common(filters, 'filters-out')
    filters.add_argument('--delta', type=_number, help=f'tube width (default: {DEFAULTS.delta:g})')
    filters.add_argument('--eps', type=_number, help=f'scale exponent (default: {DEFAULTS.eps:g})')
    filters.add_argument('--bold', action='store_true', help='tabulate the tube adapted variants')
    filters.add_argument('--dump', action='store_true', help='also write every band kernel as a field file')
    filters.set_defaults(handler=_filters)

    testset = commands.add_parser('testset', help='generate test inputs and a manifest')
    _common(testset, 'testset-out')
    testset.add_argument('--kind', choices=KINDS, default='ball', help='test set kind (default: %(default)s)')
    testset.add_argument('--repeat', type=_positive_int, default=1, help='consecutive seeds to generate (default: 1)')
    testset.add_argument('--delta', type=_number, help='tube width of tube-like sets')
    testset.add_argument('--radius', type=_number, help='ball radius')
    testset.add_argument('--count', type=int, help='tubes in a union or bumps in a sum')
    testset.add_argument('--levels', type=int, help='perron tree stages')
    testset.add_argument('--cutoff', type=_number, help='band limit of random fields (default: 1)')
    testset.add_argument('--length', type=_number, help='torus side length (default: by kind)')
    testset.set_defaults(handler=_testset)

    maximal = commands.add_parser('maximal', help='apply one maximal operator to a field file')
    _common(maximal, 'maximal-out')
    maximal.add_argument('--op', choices=MAXIMAL_OPERATORS, required=True)
    maximal.add_argument('--input', required=True, help='field file')
    maximal.add_argument('--delta', type=_number, help=f'tube width (default: {DEFAULTS.delta:g})')
    maximal.add_argument('--eps', type=_number, help=f'scale exponent (default: {DEFAULTS.eps:g})')
    maximal.add_argument('--dirs', type=_positive_int, help='direction count override')
    maximal.add_argument('--t', type=_number, help='frozen scale (default: delta^-eps)')
    maximal.add_argument('--r', type=_number, help='power of the Hardy-Littlewood operator')
    maximal.add_argument('--csv', action='store_true', help='also export the result as CSV')
    maximal.set_defaults(handler=_maximal)

    verify = commands.add_parser('verify', help='run verification suites')
    _common(verify, 'verify-out')
    verify.add_argument('--suite', action='append', choices=SUITE_NAMES, required=True, help='repeatable')
    verify.set_defaults(handler=_verify)

    sweep = commands.add_parser('sweep', help='fit the norm growth of one operator over delta')
    _common(sweep, 'sweep-out')
    sweep.add_argument('--op', choices=OPERATORS, required=True)
    sweep.add_argument('--family', choices=KINDS, default='bandlimited_random', help='(default: %(default)s)')
    sweep.add_argument(
        '--deltas', type=_number, nargs='+', help=f'at least three widths (default: {" ".join(f"{d:g}" for d in DEFAULTS.deltas)})'
    )
    sweep.add_argument('--p', type=_number, help=f'input exponent (default: {DEFAULTS.p:g})')
    sweep.add_argument('--q', type=_number, help=f'direction exponent (default: {DEFAULTS.q:g})')
    sweep.add_argument('--eps', type=_number, help=f'scale exponent (default: {DEFAULTS.eps:g})')
    sweep.add_argument('--r', type=_number, help='Bernstein exponent of the frozen bound (default: p/2)')
    sweep.add_argument('--t', type=_number, help='frozen scale (default: delta^-eps)')
    sweep.set_defaults(handler=_sweep)

    report = commands.add_parser('report', help='chart sweep CSV files')
    _common(report, 'report-out')
    report.add_argument('csv', nargs='+', help='sweep CSV files')
    report.set_defaults(handler=_report)

    return parser


def _emit_failures(failures: Failures) -> None:
    json.dump(failures, sys.stdout, indent=2, sort_keys=True, default=str)
    sys.stdout.write('\n')


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    if args.version:
        print_banner()
        return EXIT_OK
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE

    start_logging(args.log_level, args.debug)
    handler: Callable[[argparse.Namespace], Failures] = args.handler
    try:
        args.threads = resolve_threads(args.threads)
        failures = handler(args)
    except ToleranceError as exc:
        _log.error(f'{args.command}: {exc}')
        failures = exc.failures or [{'error': str(exc)}]
    except (KakeyaError, OSError) as exc:
        _log.error(f'{args.command}: {exc}')
        print(f'kakeya-lab: error: {exc}', file=sys.stderr)
        return EXIT_USAGE

    if failures:
        _emit_failures(failures)
        return EXIT_FAILED
    return EXIT_OK
