#!/usr/bin/env python
# -*- coding: utf-8 -*-

""" reference.py

Published household survey values (true vs measured consumption and income,
70 households) and the MSE table printed for them, with the assumptions
needed to recompute that table and the checks comparing the two.
"""

import dataclasses
from collections import OrderedDict

from . import model, theory, utilities
from .model import ErrorModel, ParameterSet

__all__ = ['SURVEY_VALUES', 'PRINTED_TABLE', 'PRINTED_COLUMNS', 'ASSUMED_K',
           'ASSUMED_SIGMA_2_SQ', 'REFERENCE_N', 'REFERENCE_MU_Y2',
           'REFERENCE_MU_X2', 'survey_parameters', 'reference_design',
           'printed_sum_discrepancies', 'implied_k', 'compare_cells',
           'structural_checks']

# Moments of the survey data, as printed (k and the stratum-2 error
# variances are not given)
SURVEY_VALUES = OrderedDict([
    ('n', 70),
    ('W2', 0.25),
    ('mu_y', 981.29),
    ('mu_x', 1755.53),
    ('S_y', 613.66),
    ('S_x', 1406.13),
    ('rho', 0.778),
    ('S_y2', 244.11),
    ('S_x2', 631.51),
    ('rho2', 0.445),
    ('sigma_u_sq', 36.0),
    ('sigma_v_sq', 36.0),
])

PRINTED_COLUMNS = ('without_error', 'me_contribution', 'nr_contribution', 'total')

PRINTED_TABLE = OrderedDict([
    ('t1', (10759.39, 1.03, 2553.840, 13313.58)),
    ('t_r', (6967.135, 1.35, 4607.335, 11574.92)),
    ('t_lr', (4246.903, 0.86, 2527.751, 6775.036)),
    ('t_p', (4246.903, 0.86, 2527.751, 6775.036)),
])

ASSUMED_K = 2.0
ASSUMED_SIGMA_2_SQ = 36.0

# Finite population used for simulations of the survey design
REFERENCE_N = 7000
REFERENCE_MU_Y2 = 597.29
REFERENCE_MU_X2 = 1100.24

# Relative agreement for a printed cell to count as reproduced
MATCH_RTOL = 1e-3
EQUALITY_RTOL = 1e-12


def survey_parameters(k=ASSUMED_K, sigma_2_sq=ASSUMED_SIGMA_2_SQ):
    """
    Parameter set of the survey values under an assumed k and stratum-2
    error variance (the same for Y and X).

    :return: ValidatedParameterSet
    """
    values = dict(SURVEY_VALUES)
    errors = ErrorModel(sigma_u_sq=values.pop('sigma_u_sq'),
                        sigma_v_sq=values.pop('sigma_v_sq'),
                        sigma_u2_sq=sigma_2_sq, sigma_v2_sq=sigma_2_sq)
    return model.validate(ParameterSet(k=k, errors=errors, **values))


def reference_design(k=ASSUMED_K, sigma_2_sq=ASSUMED_SIGMA_2_SQ):
    """Survey parameters with N and the stratum-2 means needed by popgen."""
    params = survey_parameters(k, sigma_2_sq)
    return dataclasses.replace(params, N=REFERENCE_N, mu_y2=REFERENCE_MU_Y2,
                               mu_x2=REFERENCE_MU_X2)


def printed_sum_discrepancies():
    """
    Printed total minus the sum of the three printed parts, per row.

    :return: OrderedDict name -> (sum of parts, printed total, difference)
    """
    result = OrderedDict()
    for name, (without, me, nr, total) in PRINTED_TABLE.items():
        parts = without + me + nr
        result[name] = (parts, total, round(parts - total, 6))
    return result


def implied_k(params=None):
    """
    Values of k that the printed t1 row implies, each from one cell.

    The non-response cell is read as (k-1) W2/n (S_y2^2 + s_u2^2) and the
    no-error cell as S_y^2/n + (k-1) W2/n S_y2^2.

    :param params: parameter set supplying the other inputs
    :return: dict cell -> k
    """
    if params is None:
        params = survey_parameters()
    without, _, nr, _ = PRINTED_TABLE['t1']
    scale = params.n / params.W2
    from_nr = 1.0 + nr * scale / (params.S_y2 ** 2 + params.errors.sigma_u2_sq)
    from_without = 1.0 + (without - params.S_y ** 2 / params.n) * scale / params.S_y2 ** 2
    return {'nr_contribution': from_nr, 'without_error': from_without}


def compare_cells(table):
    """
    Cell-by-cell comparison of a recomputed decomposition table with the
    printed one.

    :param table: dict name -> MseDecomposition
    :return: list of (estimator, column, printed, recomputed, matches)
    """
    rows = []
    for name, printed in PRINTED_TABLE.items():
        decomposition = table[name]
        for column, value in zip(PRINTED_COLUMNS, printed):
            recomputed = getattr(decomposition, column)
            matches = utilities.is_close_rel(recomputed, value, MATCH_RTOL)
            rows.append((name, column, value, recomputed, matches))
    return rows


def structural_checks(table):
    """
    Checks that hold whatever k and stratum-2 errors are: the regression
    and optimal-class rows coincide, and t_p < t_r < t1 in total MSE.

    :param table: dict name -> MseDecomposition
    :return: OrderedDict check -> bool
    """
    totals = {name: table[name].total for name in theory.ESTIMATOR_NAMES}
    rows_equal = all(
        utilities.is_close_rel(getattr(table['t_lr'], column),
                               getattr(table['t_p'], column), EQUALITY_RTOL)
        for column in PRINTED_COLUMNS)
    return OrderedDict([
        ('t_lr_equals_t_p', rows_equal),
        ('ordering_tp_tr_t1', totals['t_p'] < totals['t_r'] < totals['t1']),
    ])
