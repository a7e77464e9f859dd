#!/usr/bin/env python
# -*- coding: utf-8 -*-

""" montecarlo.py

Replication engine: R independent two-phase samples from a fixed
population, every estimator evaluated on each, empirical bias and MSE
against the closed forms.

Replications are cut into fixed blocks of replication indices. Each block
is a job for the worker pool and returns exact power sums per estimator;
the report only depends on the blocks, never on how many workers ran them.
"""

import dataclasses
import logging
import math
from collections import namedtuple
from dataclasses import dataclass
from multiprocessing import Pool
from typing import Optional

import numpy as np
import pandas as pd

from . import estimators, model, popgen, sampling, theory, utilities
from .errors import SimulationError
from .hhme_settings import HHME_Settings
from .model import EstimatorRecord, HHMeans, MonteCarloReport

__all__ = ['RunConfig', 'PowerSums', 'check_consistency', 'run',
           'grid_search_m2', 'default_grid', 'write_replications_csv',
           'report_table', 'SIMULATED_ESTIMATORS']

LOGGER = logging.getLogger('hhme')

SIMULATED_ESTIMATORS = ('t1', 't_r', 't_lr', 't_p', 't_prod')

BlockResult = namedtuple(
    'BlockResult', 'start, y_star, x_star, n1, n2, r, flagged, tallies')

GridSearchResult = namedtuple(
    'GridSearchResult', 'm2_hat, m2_opt, curvature, curve, flagged')

# Population and design shared with pool workers (set by the initializer)
_WORKER_STATE = {}


@dataclass(frozen=True)
class RunConfig:
    """
    Monte Carlo run settings.

    b and m2 left to None are taken optimal from theory; m1 None means
    1 - m2. n None means the parameter set's n. workers 0 is one per CPU.
    """
    reps: int
    seed: int
    b: Optional[float] = None
    m2: Optional[float] = None
    m1: Optional[float] = None
    workers: int = 0
    n: Optional[int] = None

    def __post_init__(self):
        if isinstance(self.reps, bool) or int(self.reps) != self.reps or self.reps < 1:
            raise SimulationError('reps must be >= 1, got {!r}'.format(self.reps))
        if int(self.seed) != self.seed or not 0 <= self.seed < 2 ** 64:
            raise SimulationError('seed must be a 64-bit unsigned integer')
        if self.m1 is not None and self.m2 is None:
            raise SimulationError('m1 given without m2')


class PowerSums(object):
    """
    Count and exact sums of d, d^2 and d^4 over a stream of deviations.

    Every block adds its own math.fsum partials; totals are the fsum of all
    partials, which does not depend on the order blocks are merged in.
    """
    POWERS = (1, 2, 4)

    def __init__(self):
        self.count = 0
        self.parts = {power: [] for power in self.POWERS}

    def add_block(self, values):
        values = np.asarray(values, dtype=float)
        self.count += len(values)
        for power in self.POWERS:
            self.parts[power].append(math.fsum(values ** power))

    def merge(self, other):
        self.count += other.count
        for power in self.POWERS:
            self.parts[power].extend(other.parts[power])
        return self

    def total(self, power):
        return math.fsum(self.parts[power])

    def mean(self, power=1):
        if self.count == 0:
            return float('nan')
        return self.total(power) / self.count

    def standard_error(self, power=1):
        """Standard error of mean(power), from the sums of power and 2*power."""
        if self.count < 2:
            return float('nan')
        centre = self.mean(power)
        spread = self.total(2 * power) - self.count * centre * centre
        return math.sqrt(max(spread, 0.0) / (self.count - 1) / self.count)


def _blocks(reps, size):
    return [(start, min(start + size, reps)) for start in range(0, reps, size)]


def check_consistency(pop, params, rtol):
    """
    Raise SimulationError when params do not describe pop.

    Overall and non-response moments, W2 and N (when set) must agree with
    population_moments(pop) within rtol relative.

    :param pop: FinitePopulation
    :param params: ValidatedParameterSet
    :param rtol: relative tolerance
    :return: None
    """
    moments = popgen.population_moments(pop)
    second = moments.nonrespondents
    pairs = [
        ('mu_y', params.mu_y, moments.overall.mu_y),
        ('mu_x', params.mu_x, moments.overall.mu_x),
        ('S_y', params.S_y, moments.overall.S_y),
        ('S_x', params.S_x, moments.overall.S_x),
        ('rho', params.rho, moments.overall.rho),
        ('W2', params.W2, moments.W2),
        ('S_y2', params.S_y2, second.S_y),
        ('S_x2', params.S_x2, second.S_x),
    ]
    if second.rho is not None:
        pairs.append(('rho2', params.rho2, second.rho))
    if params.N is not None:
        pairs.append(('N', params.N, moments.N))

    for name, given, actual in pairs:
        if actual is None:
            raise SimulationError('{} is undefined for this population'.format(name))
        if abs(given - actual) > rtol * max(abs(actual), 1e-12):
            raise SimulationError(
                'parameter/population mismatch on {}: config {!r}, '
                'population {!r}'.format(name, given, actual))


def _coefficients(params, cfg):
    b = cfg.b if cfg.b is not None else theory.b_opt(params)
    if cfg.m2 is None:
        m1, m2 = theory.m2_opt(params)
    else:
        m2 = cfg.m2
        m1 = cfg.m1 if cfg.m1 is not None else 1.0 - m2
    return {'b': b, 'm1': m1, 'm2': m2}


def _block_tallies(y_star, x_star, state):
    hh = HHMeans(y_star, x_star)
    X_bar = state['X_bar']
    values = estimators.estimate_all(hh, X_bar, state['b'], state['m1'],
                                     state['m2'], state['eps'])
    tallies = {}
    deviations = {}
    for name in SIMULATED_ESTIMATORS:
        deviations[name] = getattr(values, name) - state['Y_bar']
        tallies[name] = PowerSums()
        tallies[name].add_block(deviations[name])
    for name, other in (('tp_vs_t1', 't1'), ('tp_vs_tr', 't_r')):
        tallies[name] = PowerSums()
        tallies[name].add_block(deviations['t_p'] ** 2 - deviations[other] ** 2)
    return tallies


def _run_block(state, start, stop):
    pop = state['pop']
    size = stop - start
    y_star = np.empty(size)
    x_star = np.empty(size)
    n1 = np.empty(size, dtype=int)
    n2 = np.empty(size, dtype=int)
    r = np.empty(size, dtype=int)
    sd_table = sampling.error_sd_table(state['errors'])
    for offset, index in enumerate(range(start, stop)):
        rng = sampling.replication_rng(state['seed'], index)
        hh, n1[offset], n2[offset], r[offset] = sampling.replication_means(
            pop, state['n'], state['k'], state['errors'], rng, sd_table)
        y_star[offset] = hh.y_star
        x_star[offset] = hh.x_star

    flagged = ~estimators.ratio_defined(x_star, state['X_bar'], state['eps'])
    keep = ~flagged
    tallies = _block_tallies(y_star[keep], x_star[keep], state)
    return BlockResult(start, y_star, x_star, n1, n2, r, flagged, tallies)


def _init_worker(state):
    _WORKER_STATE.clear()
    _WORKER_STATE.update(state)


def _pool_block(start, stop):
    return _run_block(_WORKER_STATE, start, stop)


def _simulate(pop, params, cfg, coefficients, settings):
    state = {
        'pop': pop, 'seed': int(cfg.seed), 'n': params.n, 'k': params.k,
        'errors': params.errors, 'X_bar': pop.X_bar, 'Y_bar': pop.Y_bar,
        'eps': settings.get_ratio_epsilon(),
        'b': coefficients['b'], 'm1': coefficients['m1'], 'm2': coefficients['m2'],
    }
    blocks = _blocks(cfg.reps, settings.get_block_size())
    workers = min(settings.resolve_workers(cfg.workers), len(blocks))
    LOGGER.info('running {} replications in {} blocks on {} worker(s)'.format(
        cfg.reps, len(blocks), workers))

    if workers == 1:
        results = [_run_block(state, start, stop) for start, stop in blocks]
    else:
        with Pool(processes=workers, initializer=_init_worker,
                  initargs=(state,)) as pool:
            pending = [pool.apply_async(_pool_block, [start, stop])
                       for start, stop in blocks]
            pool.close()
            results = [job.get() for job in pending]
            pool.join()
    return sorted(results, key=lambda block: block.start)


def _merge_tallies(results):
    merged = {}
    for block in results:
        for name, tally in block.tallies.items():
            merged.setdefault(name, PowerSums()).merge(tally)
    return merged


def _check_flagged(flagged, reps, settings):
    if flagged:
        LOGGER.warning('{} of {} replications flagged ratio-undefined and '
                       'excluded'.format(flagged, reps))
    limit = settings.get_flagged_abort_fraction()
    if flagged > limit * reps:
        raise SimulationError(
            '{} of {} replications are ratio-undefined (more than {:g}); '
            'X_bar is too close to zero for this design'.format(
                flagged, reps, limit))


def _theory_params(params, cfg):
    p = model.validate(params)
    if cfg.n is not None and cfg.n != p.n:
        return model.validate(dataclasses.replace(p, n=int(cfg.n)))
    return p


def _theoretical_mses(params, cfg, coefficients):
    b, m1, m2 = coefficients['b'], coefficients['m1'], coefficients['m2']
    if cfg.m1 is None:
        tp = theory.mse_tp(params, m2)
    else:
        tp = theory.mse_tp_weights(params, m1, m2)
    return {
        't1': theory.mse_t1(params).total,
        't_r': theory.mse_tr(params).total,
        't_lr': theory.mse_tlr(params, b),
        't_p': tp,
        't_prod': theory.mse_tprod(params).total,
    }


def _record(tally, true_mean, theoretical):
    bias = tally.mean(1)
    mse = tally.mean(2)
    if theoretical != 0:
        rel_deviation = mse / theoretical - 1.0
    else:
        rel_deviation = float('nan')
    return EstimatorRecord(
        count=tally.count, empirical_mean=true_mean + bias,
        empirical_bias=bias, empirical_mse=mse, theoretical_mse=theoretical,
        rel_deviation=rel_deviation, se_bias=tally.standard_error(1),
        se_mse=tally.standard_error(2))


def run(pop, params, cfg, settings=None, replications_csv=None):
    """
    Monte Carlo comparison of every estimator with its first-order MSE.

    Ratio-undefined replications are dropped from all estimators alike and
    counted; above the abort fraction the run fails.

    :param pop: FinitePopulation
    :param params: ValidatedParameterSet describing pop
    :param cfg: RunConfig
    :param settings: HHME_Settings, default from the environment
    :param replications_csv: optional path of the per-replication dump
    :return: MonteCarloReport
    """
    if settings is None:
        settings = HHME_Settings()
    params = _theory_params(params, cfg)
    check_consistency(pop, params, settings.get_consistency_rtol())
    coefficients = _coefficients(params, cfg)

    results = _simulate(pop, params, cfg, coefficients, settings)
    flagged = int(sum(np.count_nonzero(block.flagged) for block in results))
    _check_flagged(flagged, cfg.reps, settings)

    tallies = _merge_tallies(results)
    theoretical = _theoretical_mses(params, cfg, coefficients)
    true_mean = pop.Y_bar
    records = {name: _record(tallies[name], true_mean, theoretical[name])
               for name in SIMULATED_ESTIMATORS}
    contrasts = {}
    for name in ('tp_vs_t1', 'tp_vs_tr'):
        contrasts[name] = {'mean_diff': tallies[name].mean(1),
                           'se': tallies[name].standard_error(1)}

    if replications_csv:
        write_replications_csv(results, pop.X_bar, coefficients,
                               replications_csv, settings.get_csv_row_cap())

    LOGGER.info('simulation finished: {} kept, {} flagged'.format(
        cfg.reps - flagged, flagged))
    return MonteCarloReport(
        reps=cfg.reps, seed=int(cfg.seed), params=params,
        population_mean=true_mean, coefficients=coefficients,
        records=records, contrasts=contrasts, flagged=flagged)


def default_grid(center, half_width, step):
    """
    Grid center - half_width, ..., center + half_width in steps of step.

    :return: numpy array, rounded to 12 decimals
    """
    if step <= 0 or half_width < 0:
        raise SimulationError('grid needs step > 0 and half_width >= 0')
    half = utilities.round_half_up(half_width / step)
    return np.round(center + step * np.arange(-half, half + 1), 12)


def grid_search_m2(pop, params, cfg, grid, settings=None):
    """
    Empirical MSE of t_p over a grid of m2 (m1 = 1 - m2).

    Every grid point is evaluated on the same replications, so the curve
    carries common random numbers and its minimum is located sharply.

    :param pop: FinitePopulation
    :param params: ValidatedParameterSet describing pop
    :param cfg: RunConfig (b, m1, m2 are ignored)
    :param grid: non-empty sequence of m2 values
    :param settings: HHME_Settings
    :return: GridSearchResult with the curve as a pandas DataFrame
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise SimulationError('grid must not be empty')
    if settings is None:
        settings = HHME_Settings()
    params = _theory_params(params, cfg)
    check_consistency(pop, params, settings.get_consistency_rtol())
    m1_opt, m2_opt = theory.m2_opt(params)
    coefficients = {'b': theory.b_opt(params), 'm1': m1_opt, 'm2': m2_opt}

    results = _simulate(pop, params, cfg, coefficients, settings)
    flagged = int(sum(np.count_nonzero(block.flagged) for block in results))
    _check_flagged(flagged, cfg.reps, settings)

    rows = []
    X_bar, Y_bar = pop.X_bar, pop.Y_bar
    for m2 in grid:
        tally = PowerSums()
        for block in results:
            keep = ~block.flagged
            hh = HHMeans(block.y_star[keep], block.x_star[keep])
            values = estimators.t_proposed(hh, X_bar, 1.0 - m2, m2)
            tally.add_block(values - Y_bar)
        rows.append({'m2': float(m2), 'empirical_mse': tally.mean(2),
                     'theoretical_mse': theory.mse_tp(params, m2),
                     'se_mse': tally.standard_error(2)})

    curve = pd.DataFrame(rows, columns=['m2', 'empirical_mse',
                                        'theoretical_mse', 'se_mse'])
    best = int(np.argmin(curve['empirical_mse'].values))
    curvature = float('nan')
    if len(curve) >= 3:
        curvature = float(np.polyfit(curve['m2'].values,
                                     curve['empirical_mse'].values, 2)[0])
    m2_hat = float(curve['m2'].iloc[best])
    LOGGER.info('grid minimum at m2={:.4f} (theory {:.4f})'.format(m2_hat, m2_opt))
    return GridSearchResult(m2_hat, m2_opt, curvature, curve, flagged)


def write_replications_csv(results, X_bar, coefficients, filename, cap):
    """
    Dump the first cap replications: HH means, stratum counts, the
    flag and every estimate (those using x* are empty when flagged).

    :param results: BlockResult list in block order
    :param X_bar: population mean of X
    :param coefficients: dict with b, m1, m2
    :param filename: CSV path
    :param cap: maximum number of rows
    :return: number of rows written
    """
    frames = []
    written = 0
    for block in results:
        if written >= cap:
            break
        take = min(len(block.y_star), cap - written)
        y_star = block.y_star[:take]
        x_star = block.x_star[:take]
        flagged = block.flagged[:take]
        frame = pd.DataFrame({
            'rep': np.arange(block.start, block.start + take),
            'n1': block.n1[:take], 'n2': block.n2[:take], 'r': block.r[:take],
            'y_star': y_star, 'x_star': x_star, 'flagged': flagged.astype(int)})
        safe_x = np.where(flagged, np.nan, x_star)
        hh = HHMeans(y_star, safe_x)
        frame['t1'] = estimators.t1(hh)
        frame['t_r'] = y_star / safe_x * X_bar
        frame['t_lr'] = estimators.t_regression(hh, X_bar, coefficients['b'])
        frame['t_p'] = coefficients['m1'] * y_star + coefficients['m2'] * frame['t_r']
        frame['t_prod'] = estimators.t_product(hh, X_bar)
        frames.append(frame)
        written += take
    if written < sum(len(block.y_star) for block in results):
        LOGGER.warning('replication dump capped at {} rows'.format(cap))
    pd.concat(frames, ignore_index=True).to_csv(
        filename, index=False, float_format='%.17g')
    return written


def report_table(report):
    """
    Empirical-vs-theory table of a MonteCarloReport, one row per estimator.

    :return: pandas DataFrame indexed by estimator name
    """
    rows = []
    for name in SIMULATED_ESTIMATORS:
        record = report.records[name]
        rows.append({
            'estimator': name, 'count': record.count,
            'bias': record.empirical_bias, 'se_bias': record.se_bias,
            'empirical_mse': record.empirical_mse, 'se_mse': record.se_mse,
            'theoretical_mse': record.theoretical_mse,
            'rel_dev': record.rel_deviation,
        })
    return pd.DataFrame(rows).set_index('estimator')
