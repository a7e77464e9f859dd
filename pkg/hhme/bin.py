#!/usr/bin/env python
# -*- coding: utf-8 -*-

""" File containing functions called by the hhme executable """

import json
import logging
import sys
from argparse import ArgumentParser, RawTextHelpFormatter
from collections import OrderedDict

import numpy as np
import pandas as pd

from . import ingest
from . import log
from . import model
from . import montecarlo
from . import popgen
from . import reference
from . import theory
from . import utilities
from .errors import ConfigError, HhmeError, TheoryError, ToleranceError
from .hhme_settings import DEFAULT_SEED, HHME_Settings, SEED_ENV_VAR
from .version import VERSION

LOGGER = logging.getLogger('hhme')

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_TOLERANCE = 3

DECOMPOSITION_COLUMNS = ('without_error', 'me_contribution',
                         'nr_contribution', 'total')


def set_logger(logfile, debug):
    """
    Set the logging depth

    :param logfile: File to log output to
    :param debug: Should debug depth be used?
    :return: logger object

    """
    if debug:
        logger = log.setup_debug_logger('hhme', logfile)
    else:
        logger = log.setup_info_logger('hhme', logfile)
    return logger


def _fmt(value):
    # shortest round-trip form, the digits json.dumps writes
    if value is None:
        return 'null'
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _dumps(document):
    return json.dumps(document, indent=2, sort_keys=True)


def _header(command):
    return OrderedDict([
        ('schema_version', HHME_Settings().get_json_schema_version()),
        ('command', command),
        ('version', VERSION),
    ])


def decomposition_frame(table, decomposition=True):
    """
    Rows t1, t_r, t_lr, t_p of a decomposition table as a DataFrame.

    :param table: dict name -> MseDecomposition
    :param decomposition: all four columns, or only the total
    :return: pandas DataFrame
    """
    columns = DECOMPOSITION_COLUMNS if decomposition else ('total',)
    rows = OrderedDict()
    for name in theory.ESTIMATOR_NAMES:
        rows[name] = [getattr(table[name], column) for column in columns]
    return pd.DataFrame.from_dict(rows, orient='index', columns=list(columns))


def theory_report(params, decomposition=True):
    """
    Closed-form report of one parameter set.

    :param params: ValidatedParameterSet
    :param decomposition: include the error/non-response split
    :return: OrderedDict, JSON-ready
    """
    moments = theory.derive_moments(params)
    table = theory.decomposition_table(params)
    try:
        m1, m2 = theory.m2_opt(params)
    except TheoryError as exc:
        LOGGER.warning(str(exc))
        m1 = m2 = None
    efficiency = theory.efficiency_report(params)

    report = _header('theory')
    report['params'] = params.to_dict()
    report['moments'] = OrderedDict(
        (name, getattr(moments, name)) for name in ('A', 'M', 'Nq', 'O', 'R'))
    report['estimators'] = OrderedDict()
    for name in theory.ESTIMATOR_NAMES:
        if decomposition:
            report['estimators'][name] = table[name].as_dict()
        else:
            report['estimators'][name] = {'total': table[name].total}
    report['coefficients'] = OrderedDict(
        [('b', theory.b_opt(params)), ('m1', m1), ('m2', m2)])
    report['bias'] = OrderedDict([('t1', theory.bias_t1(params)),
                                  ('t_r', theory.bias_tr(params))])
    report['efficiency'] = OrderedDict([
        ('gain_vs_t1', efficiency.gain_vs_t1),
        ('gain_vs_tr', efficiency.gain_vs_tr),
        ('gain_vs_tprod', efficiency.gain_vs_tprod),
        ('conditions_hold', efficiency.conditions_hold),
    ])
    report['product'] = OrderedDict([('bias', theory.bias_tprod(params)),
                                     ('mse', theory.mse_tprod(params).total)])
    return report, table


def theory_text(report, table, decomposition=True):
    lines = ['MSE of the estimators (first order)', '']
    lines.append(decomposition_frame(table, decomposition).to_string(
        float_format=_fmt))
    lines.append('')
    coefficients = report['coefficients']
    lines.append('b*  = {}'.format(_fmt(coefficients['b'])))
    if coefficients['m2'] is not None:
        lines.append('m1* = {}'.format(_fmt(coefficients['m1'])))
        lines.append('m2* = {}'.format(_fmt(coefficients['m2'])))
    lines.append('bias(t_r) = {}'.format(_fmt(report['bias']['t_r'])))
    lines.append('')
    efficiency = report['efficiency']
    for name in ('gain_vs_t1', 'gain_vs_tr', 'gain_vs_tprod'):
        lines.append('{:<14}{}'.format(name, _fmt(efficiency[name])))
    held = ', '.join('{}={}'.format(key, value) for key, value in
                     sorted(efficiency['conditions_hold'].items()))
    lines.append('conditions: {}'.format(held))
    lines.append('')
    lines.append('product estimator: bias {}, MSE {}'.format(
        _fmt(report['product']['bias']), _fmt(report['product']['mse'])))
    return '\n'.join(lines)


def cmd_theory(config, as_json=False, decomposition=True, out=None):
    """
    Print the closed-form table of a config file.

    :param config: parameter config path
    :param as_json: JSON instead of the text table
    :param decomposition: include the error/non-response split
    :param out: output stream, sys.stdout by default
    :return: exit code
    """
    out = out or sys.stdout
    params = model.read_parameters(config)
    report, table = theory_report(params, decomposition)
    if as_json:
        out.write(_dumps(report) + '\n')
    else:
        out.write(theory_text(report, table, decomposition) + '\n')
    return EXIT_OK


def simulation_text(report, grid=None):
    frame = montecarlo.report_table(report)
    frame['z'] = ((frame['empirical_mse'] - frame['theoretical_mse']) /
                  frame['se_mse'])
    lines = ['Monte Carlo: {} replications, seed {}'.format(report.reps, report.seed),
             'population mean of Y: {}'.format(_fmt(report.population_mean)),
             'coefficients: ' + ', '.join(
                 '{}={}'.format(name, _fmt(value))
                 for name, value in report.coefficients.items()),
             '',
             frame.to_string(float_format=_fmt),
             '']
    for name, values in report.contrasts.items():
        lines.append('{}: mean squared-error difference {} (s.e. {})'.format(
            name, _fmt(values['mean_diff']), _fmt(values['se'])))
    lines.append('ratio-undefined replications: {} of {}'.format(
        report.flagged, report.reps))
    if grid is not None:
        lines.append('grid minimum m2_hat = {} (m2* = {}, curvature {})'.format(
            _fmt(grid.m2_hat), _fmt(grid.m2_opt), _fmt(grid.curvature)))
    return '\n'.join(lines)


def simulation_document(report, grid=None):
    document = _header('simulate')
    document.update(report.as_dict())
    if grid is not None:
        document['grid'] = OrderedDict([
            ('m2_hat', grid.m2_hat), ('m2_opt', grid.m2_opt),
            ('curvature', grid.curvature)])
    return document


def _tolerance_failures(report, tol):
    return [name for name in theory.ESTIMATOR_NAMES
            if not abs(report.records[name].rel_deviation) <= tol]


def cmd_simulate(config, reps, seed=None, workers=0, tol=None, grid_m2=None,
                 as_json=False, population_csv=None, replications_csv=None,
                 out=None):
    """
    Build the population of a config, run the Monte Carlo comparison and
    print it.

    :param config: parameter config path, N required
    :param reps: number of replications
    :param seed: master seed, HHME_SEED or the default when None
    :param workers: worker processes, 0 for one per CPU
    :param tol: relative deviation allowed for t1, t_r, t_lr and t_p
    :param grid_m2: path of the m2 grid curve CSV (grid search skipped if None)
    :param as_json: JSON instead of the text table
    :param population_csv: path of the population dump
    :param replications_csv: path of the per-replication dump
    :param out: output stream, sys.stdout by default
    :return: exit code
    :raises ToleranceError: when a deviation exceeds tol
    """
    out = out or sys.stdout
    settings = HHME_Settings()
    if seed is None:
        seed = settings.get_default_seed()
    if tol is None:
        tol = settings.get_default_tolerance()

    params = model.read_parameters(config)
    if params.N is None:
        raise ConfigError('simulate needs a finite population size N')

    spec = popgen.spec_from_parameters(params)
    pop = popgen.generate_population(spec, seed)
    if population_csv:
        popgen.write_population_csv(pop, population_csv)
    realized = popgen.population_moments(pop).to_parameters(
        params.n, params.k, params.errors)

    cfg = montecarlo.RunConfig(reps=reps, seed=seed, workers=workers)
    report = montecarlo.run(pop, realized, cfg, settings=settings,
                            replications_csv=replications_csv)

    grid = None
    if grid_m2:
        _, m2_star = theory.m2_opt(realized)
        half_width, step = settings.get_default_grid()
        points = montecarlo.default_grid(m2_star, half_width, step)
        grid = montecarlo.grid_search_m2(pop, realized, cfg, points, settings)
        grid.curve.to_csv(grid_m2, index=False, float_format='%.17g')

    if as_json:
        out.write(_dumps(simulation_document(report, grid)) + '\n')
    else:
        out.write(simulation_text(report, grid) + '\n')

    failures = _tolerance_failures(report, tol)
    if failures:
        raise ToleranceError(failures, tol)
    return EXIT_OK


def cmd_ingest(dataset, k=None, out_config=None, W2=None, out=None):
    """
    Estimate a parameter set from a paired dataset and write it as config.

    :param dataset: CSV path
    :param k: inverse subsampling fraction (default with a warning)
    :param out_config: destination config path, stdout when None
    :param W2: non-response weight override
    :param out: output stream, sys.stdout by default
    :return: exit code
    """
    out = out or sys.stdout
    data = ingest.load_dataset(dataset)
    params = ingest.estimate_parameters(data, k=k, W2_override=W2)
    checks = ingest.indirect_variances(data)
    LOGGER.info('direct vs indirect variances:\n{}'.format(
        checks.to_string(index=False, float_format=_fmt)))
    if out_config:
        model.write_parameters(params, out_config)
        LOGGER.info('parameters written to: {}'.format(out_config))
    else:
        out.write(utilities.dump_yaml(params.to_dict()))
    return EXIT_OK


def reproduce_report():
    """
    Printed survey table against the table recomputed under the stated
    assumptions, with the discrepancies and the structural checks.

    :return: (OrderedDict JSON-ready, recomputed table)
    """
    params = reference.survey_parameters()
    table = theory.decomposition_table(params)
    report = _header('reproduce')
    report['assumptions'] = OrderedDict([
        ('k', reference.ASSUMED_K),
        ('sigma_u2_sq', reference.ASSUMED_SIGMA_2_SQ),
        ('sigma_v2_sq', reference.ASSUMED_SIGMA_2_SQ),
    ])
    report['params'] = params.to_dict()
    report['printed'] = OrderedDict(
        (name, OrderedDict(zip(reference.PRINTED_COLUMNS, values)))
        for name, values in reference.PRINTED_TABLE.items())
    report['recomputed'] = OrderedDict(
        (name, table[name].as_dict()) for name in theory.ESTIMATOR_NAMES)
    report['printed_sums'] = OrderedDict(
        (name, OrderedDict([('sum_of_parts', parts), ('printed_total', total),
                            ('difference', diff)]))
        for name, (parts, total, diff) in
        reference.printed_sum_discrepancies().items())
    report['implied_k'] = reference.implied_k(params)
    report['cells'] = [
        OrderedDict([('estimator', name), ('column', column),
                     ('printed', printed), ('recomputed', recomputed),
                     ('matches', matches)])
        for name, column, printed, recomputed, matches in
        reference.compare_cells(table)]
    report['structural_checks'] = reference.structural_checks(table)
    return report, table


def reproduce_text(report, table):
    assumptions = report['assumptions']
    printed = pd.DataFrame.from_dict(
        reference.PRINTED_TABLE, orient='index',
        columns=list(reference.PRINTED_COLUMNS))
    lines = ['(a) printed table', printed.to_string(float_format=_fmt), '',
             '(b) recomputed, assuming k = {}, sigma_u2_sq = {}, '
             'sigma_v2_sq = {}'.format(
                 _fmt(assumptions['k']), _fmt(assumptions['sigma_u2_sq']),
                 _fmt(assumptions['sigma_v2_sq'])),
             decomposition_frame(table).to_string(float_format=_fmt), '',
             '(c) discrepancies']
    for name, values in report['printed_sums'].items():
        if values['difference'] != 0:
            lines.append('  {}: printed parts sum to {}, printed total {} '
                         '(difference {})'.format(
                             name, _fmt(values['sum_of_parts']),
                             _fmt(values['printed_total']),
                             _fmt(values['difference'])))
    for cell, value in sorted(report['implied_k'].items()):
        lines.append('  t1 {} cell implies k = {}'.format(cell, _fmt(value)))
    matched = [cell for cell in report['cells'] if cell['matches']]
    lines.append('  printed cells reproduced: {} of {}'.format(
        len(matched), len(report['cells'])))
    for cell in report['cells']:
        status = 'match' if cell['matches'] else 'differs'
        lines.append('    {:<5} {:<16} printed {:>12} recomputed {:>14}  {}'.format(
            cell['estimator'], cell['column'], _fmt(cell['printed']),
            _fmt(cell['recomputed']), status))
    lines.append('')
    lines.append('(d) structural checks')
    for name, held in report['structural_checks'].items():
        lines.append('  {:<20} {}'.format(name, 'holds' if held else 'FAILS'))
    return '\n'.join(lines)


def cmd_reproduce(as_json=False, out=None):
    """
    Print the survey comparison report.

    :param as_json: JSON instead of text
    :param out: output stream, sys.stdout by default
    :return: exit code
    """
    out = out or sys.stdout
    report, table = reproduce_report()
    if as_json:
        out.write(_dumps(report) + '\n')
    else:
        out.write(reproduce_text(report, table) + '\n')
    return EXIT_OK


class HhmeArgumentParser(ArgumentParser):
    """ArgumentParser exiting with the usage code on bad arguments."""
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, '%s: error: %s\n' % (self.prog, message))


def add_common_arguments(parser):
    parser.add_argument('--logfile', dest='logfile', default=None,
                        help='Logs file path if needed. Default: stderr.')
    parser.add_argument('--debug', dest='debug', action='store_true',
                        help='Print debug log messages.')
    return parser


def make_parser():
    """
    Argument parser of the hhme executable.

    :return: parser object
    """
    settings = HHME_Settings()
    parser = HhmeArgumentParser(
        prog='hhme', formatter_class=RawTextHelpFormatter,
        description='Mean estimators under non-response subsampling and '
                    'measurement error:\n closed-form MSEs, Monte Carlo '
                    'checks and parameter ingestion.')
    parser.add_argument('--version', action='version', version=VERSION)
    subparsers = parser.add_subparsers(dest='command', metavar='command')
    subparsers.required = True

    p_theory = subparsers.add_parser('theory', help='closed-form MSE table')
    p_theory.add_argument('config', help='parameter config (YAML)')
    p_theory.add_argument('--json', dest='as_json', action='store_true',
                          help='JSON output.')
    p_theory.add_argument('--no-decomposition', dest='decomposition',
                          action='store_false',
                          help='Only the total MSE column.')
    add_common_arguments(p_theory)

    p_sim = subparsers.add_parser('simulate', help='Monte Carlo check')
    p_sim.add_argument('config', help='parameter config (YAML) with N')
    p_sim.add_argument('--reps', type=int, default=settings.get_default_reps(),
                       help='Replications. Default: %(default)s.')
    p_sim.add_argument('--seed', type=lambda value: int(value, 0), default=None,
                       help='Master seed. Default: env {}, else {}.'.format(
                           SEED_ENV_VAR, DEFAULT_SEED))
    p_sim.add_argument('--workers', type=int,
                       default=settings.get_default_workers(),
                       help='Worker processes, 0 for one per CPU.')
    p_sim.add_argument('--tol', type=float,
                       default=settings.get_default_tolerance(),
                       help='Relative deviation allowed. Default: %(default)s.')
    p_sim.add_argument('--grid-m2', dest='grid_m2', default=None, metavar='PATH',
                       help='Run the m2 grid search and write its curve here.')
    p_sim.add_argument('--population-csv', dest='population_csv', default=None,
                       metavar='PATH', help='Dump the population.')
    p_sim.add_argument('--replications-csv', dest='replications_csv',
                       default=None, metavar='PATH',
                       help='Dump per-replication values (capped).')
    p_sim.add_argument('--json', dest='as_json', action='store_true',
                       help='JSON output.')
    add_common_arguments(p_sim)

    p_ingest = subparsers.add_parser('ingest', help='parameters from a dataset')
    p_ingest.add_argument('dataset', help='CSV with y_true, x_true, y_meas, '
                                          'x_meas, stratum')
    p_ingest.add_argument('--k', type=float, default=None,
                          help='Inverse subsampling fraction. Default: 2.')
    p_ingest.add_argument('--W2', dest='W2', type=float, default=None,
                          help='Non-response weight. Default: share of stratum-2 rows.')
    p_ingest.add_argument('--out', dest='out_config', default=None,
                          help='Config file to write. Default: stdout.')
    add_common_arguments(p_ingest)

    p_repro = subparsers.add_parser('reproduce',
                                    help='printed vs recomputed survey table')
    p_repro.add_argument('--json', dest='as_json', action='store_true',
                         help='JSON output.')
    add_common_arguments(p_repro)
    return parser


def _dispatch(args):
    if args.command == 'theory':
        return cmd_theory(args.config, args.as_json, args.decomposition)
    if args.command == 'simulate':
        return cmd_simulate(args.config, args.reps, seed=args.seed,
                            workers=args.workers, tol=args.tol,
                            grid_m2=args.grid_m2, as_json=args.as_json,
                            population_csv=args.population_csv,
                            replications_csv=args.replications_csv)
    if args.command == 'ingest':
        return cmd_ingest(args.dataset, k=args.k, out_config=args.out_config,
                          W2=args.W2)
    return cmd_reproduce(args.as_json)


def _report_error(exc, logfile):
    # the message always reaches stderr, the log file gets a copy
    if logfile:
        LOGGER.error(str(exc))
    sys.stderr.write('hhme: {}\n'.format(exc))


def main(argv=None):
    """
    Entry point of the hhme executable.

    :param argv: argument list, sys.argv[1:] by default
    :return: exit code
    """
    args = make_parser().parse_args(argv)
    set_logger(args.logfile, args.debug)
    try:
        return _dispatch(args)
    except ToleranceError as exc:
        _report_error(exc, args.logfile)
        return EXIT_TOLERANCE
    except HhmeError as exc:
        _report_error(exc, args.logfile)
        return EXIT_VALIDATION
