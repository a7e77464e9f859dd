#!/usr/bin/env python
# -*- coding: utf-8 -*-

""" ingest.py

Turn a paired true/measured dataset into a ParameterSet: population
moments from the true columns, measurement-error variances from
measured minus true, per response stratum.
"""

import logging
import math

import numpy as np
import pandas as pd

from . import model, sampling
from .errors import IngestError
from .hhme_settings import HHME_Settings
from .model import ErrorModel, NONRESPONDENT, RESPONDENT

__all__ = ['PairedDataset', 'load_dataset', 'estimate_parameters',
           'indirect_variances', 'dataset_from_population', 'COLUMNS']

LOGGER = logging.getLogger('hhme')

COLUMNS = ('y_true', 'x_true', 'y_meas', 'x_meas', 'stratum')

MIN_ROWS = 3


class PairedDataset(object):
    """Rows of true and measured (Y, X) with the response stratum label."""
    def __init__(self, frame):
        missing = [col for col in COLUMNS if col not in frame.columns]
        if missing:
            raise IngestError('missing column(s): {}'.format(', '.join(missing)))
        frame = frame.loc[:, list(COLUMNS)].reset_index(drop=True)
        if len(frame) < MIN_ROWS:
            raise IngestError('need at least {} rows, got {}'.format(
                MIN_ROWS, len(frame)))
        labels = frame['stratum']
        bad = ~labels.isin((RESPONDENT, NONRESPONDENT))
        if bad.any():
            row = int(np.flatnonzero(bad.values)[0]) + 1
            raise IngestError('stratum must be 1 or 2 (row {}, got {!r})'.format(
                row, labels.iloc[row - 1]))
        frame['stratum'] = labels.astype(int)
        self.frame = frame

    @property
    def n(self):
        return len(self.frame)

    def rows(self, label=None):
        """All rows, or those of one stratum."""
        if label is None:
            return self.frame
        return self.frame[self.frame['stratum'] == label]

    def __len__(self):
        return self.n


def load_dataset(path):
    """
    Read a paired dataset from CSV.

    The header must carry y_true, x_true, y_meas, x_meas and stratum; extra
    columns are ignored.

    :param path: CSV file path
    :return: PairedDataset
    :raises IngestError: missing file or column, non-numeric cell
    """
    LOGGER.debug('loading dataset from: {}'.format(path))
    try:
        raw = pd.read_csv(path, dtype=str, keep_default_na=False,
                          skipinitialspace=True)
    except (IOError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise IngestError('dataset {} could not be read: {}'.format(path, exc))

    missing = [col for col in COLUMNS if col not in raw.columns]
    if missing:
        raise IngestError('missing column(s): {}'.format(', '.join(missing)))

    frame = pd.DataFrame(index=raw.index)
    for col in COLUMNS:
        values = pd.to_numeric(raw[col].str.strip(), errors='coerce')
        bad = ~np.isfinite(values.astype(float))
        if bad.any():
            row = int(np.flatnonzero(bad.values)[0])
            raise IngestError('non-numeric value {!r} at row {}, column {}'.format(
                raw[col].iloc[row], row + 1, col))
        frame[col] = values.astype(float)
    return PairedDataset(frame)


def _error_variance(rows, meas, true):
    if len(rows) < 2:
        return None
    return float(np.var(rows[meas].values - rows[true].values, ddof=1))


def _stratum_errors(data):
    first = data.rows(RESPONDENT)
    second = data.rows(NONRESPONDENT)
    if len(first) < 2:
        raise IngestError('stratum 1 needs at least 2 rows, got {}'.format(len(first)))

    values = {
        'sigma_u_sq': _error_variance(first, 'y_meas', 'y_true'),
        'sigma_v_sq': _error_variance(first, 'x_meas', 'x_true'),
        'sigma_u2_sq': _error_variance(second, 'y_meas', 'y_true'),
        'sigma_v2_sq': _error_variance(second, 'x_meas', 'x_true'),
    }
    if values['sigma_u2_sq'] is None:
        if len(second):
            LOGGER.warning('stratum 2 has {} row(s): its error variances are '
                           'taken from stratum 1'.format(len(second)))
        values['sigma_u2_sq'] = values['sigma_u_sq']
        values['sigma_v2_sq'] = values['sigma_v_sq']
    return ErrorModel(**values)


def _moments(rows):
    """(mu_y, mu_x, S_y, S_x, rho) of the true columns, divisor size - 1."""
    y = rows['y_true'].values
    x = rows['x_true'].values
    mu_y = math.fsum(y) / len(y)
    mu_x = math.fsum(x) / len(x)
    if len(rows) < 2:
        return mu_y, mu_x, 0.0, 0.0, 0.0
    S_y = float(np.std(y, ddof=1))
    S_x = float(np.std(x, ddof=1))
    rho = 0.0
    if S_y > 0 and S_x > 0:
        rho = float(np.clip(np.corrcoef(x, y)[0, 1], -1.0, 1.0))
    return mu_y, mu_x, S_y, S_x, rho


def indirect_variances(data):
    """
    Cross-check of each true-column variance with the indirect route
    s^2(meas) - error variance, overall and for the non-response stratum.

    :param data: PairedDataset
    :return: pandas DataFrame with columns group, variable, direct,
     error_variance, indirect, positive
    """
    groups = [('overall', data.rows())]
    if len(data.rows(NONRESPONDENT)) >= 2:
        groups.append(('nonresponse', data.rows(NONRESPONDENT)))

    rows = []
    for group, part in groups:
        for variable in ('y', 'x'):
            true = part['{}_true'.format(variable)].values
            meas = part['{}_meas'.format(variable)].values
            error_variance = float(np.var(meas - true, ddof=1))
            indirect = float(np.var(meas, ddof=1)) - error_variance
            rows.append({'group': group, 'variable': variable,
                         'direct': float(np.var(true, ddof=1)),
                         'error_variance': error_variance,
                         'indirect': indirect, 'positive': indirect > 0})
    return pd.DataFrame(rows, columns=['group', 'variable', 'direct',
                                       'error_variance', 'indirect', 'positive'])


def estimate_parameters(data, k=None, W2_override=None, settings=None):
    """
    Parameter set of a paired dataset.

    :param data: PairedDataset
    :param k: inverse subsampling fraction (cannot be read from the data);
     defaults to 2 with a warning
    :param W2_override: non-response weight to use instead of the stratum-2
     fraction of the rows
    :param settings: HHME_Settings
    :return: ValidatedParameterSet
    :raises IngestError: when the indirect variance route is not positive
    """
    if settings is None:
        settings = HHME_Settings()
    if k is None:
        k = settings.get_default_ingest_k()
        LOGGER.warning('k is not recoverable from the data; assuming k = {:g}'.format(k))

    second = data.rows(NONRESPONDENT)
    if W2_override is not None:
        W2 = float(W2_override)
        if W2 > 0 and len(second) == 0:
            raise IngestError('W2 override {} needs stratum-2 rows'.format(W2))
    else:
        W2 = len(second) / data.n

    checks = indirect_variances(data)
    failed = checks[~checks['positive']]
    if len(failed):
        row = failed.iloc[0]
        raise IngestError('error variance exceeds observed variance for {} ({})'.format(
            row['variable'], row['group']))

    mu_y, mu_x, S_y, S_x, rho = _moments(data.rows())
    if len(second):
        mu_y2, mu_x2, S_y2, S_x2, rho2 = _moments(second)
    else:
        mu_y2 = mu_x2 = None
        S_y2 = S_x2 = rho2 = 0.0

    params = model.ParameterSet(
        n=data.n, W2=W2, k=float(k), mu_y=mu_y, mu_x=mu_x, S_y=S_y, S_x=S_x,
        rho=rho, S_y2=S_y2, S_x2=S_x2, rho2=rho2, mu_y2=mu_y2, mu_x2=mu_x2,
        errors=_stratum_errors(data))
    LOGGER.info('estimated parameters from {} rows ({} in stratum 2)'.format(
        data.n, len(second)))
    return model.validate(params)


def dataset_from_population(pop, errors, seed):
    """
    Observe every unit of a population once, as a paired dataset.

    :param pop: FinitePopulation
    :param errors: ErrorModel
    :param seed: integer seed
    :return: PairedDataset
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    idx = np.arange(pop.N)
    x_meas, y_meas = sampling.observe(idx, pop, errors, rng)
    frame = pd.DataFrame({
        'y_true': pop.y_true, 'x_true': pop.x_true,
        'y_meas': y_meas, 'x_meas': x_meas,
        'stratum': pop.stratum.astype(int)})
    return PairedDataset(frame)
