#!/usr/bin/env python
# -*- coding: utf-8 -*-

""" model.py

Shared domain types of hhme and their validation. Nothing here computes
beyond derived accessors; the closed forms live in theory.py and the
simulation in sampling.py / montecarlo.py.
"""

import dataclasses
import logging
import math
from collections import namedtuple
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from . import utilities
from .errors import ConfigError, ParameterError, SimulationError
from .validate import validate as validate_config_file

__all__ = ['ErrorModel', 'ParameterSet', 'ValidatedParameterSet',
           'FinitePopulation', 'SampleRealization', 'HHMeans', 'EstimateSet',
           'DerivedMoments', 'MseDecomposition', 'EstimatorRecord',
           'MonteCarloReport', 'validate', 'read_parameters',
           'write_parameters', 'CONFIG_KEYS']

LOGGER = logging.getLogger('hhme')

ERROR_KEYS = ('sigma_u_sq', 'sigma_v_sq', 'sigma_u2_sq', 'sigma_v2_sq')

CONFIG_KEYS = ('n', 'N', 'W2', 'k', 'mu_y', 'mu_x', 'S_y', 'S_x', 'rho',
               'S_y2', 'S_x2', 'rho2', 'mu_y2', 'mu_x2') + ERROR_KEYS

_OPTIONAL_KEYS = ('N', 'mu_y2', 'mu_x2')
_INTEGER_KEYS = ('n', 'N')

RESPONDENT = 1
NONRESPONDENT = 2

# Integrality slack for W2*N
_INTEGRAL_TOL = 1e-9


def _is_finite(value):
    try:
        return math.isfinite(value)
    except TypeError:
        return False


@dataclass(frozen=True)
class ErrorModel:
    """Measurement-error variances for Y (u) and X (v), by response stratum."""
    sigma_u_sq: float = 0.0
    sigma_v_sq: float = 0.0
    sigma_u2_sq: float = 0.0
    sigma_v2_sq: float = 0.0

    def __post_init__(self):
        for name in ERROR_KEYS:
            value = getattr(self, name)
            if isinstance(value, bool) or not _is_finite(value):
                raise ParameterError(
                    '{} must be a finite number, got {!r}'.format(name, value))
            if value < 0:
                raise ParameterError(
                    '{} must be >= 0, got {!r}'.format(name, value))

    def is_zero(self):
        return all(getattr(self, name) == 0 for name in ERROR_KEYS)

    def as_dict(self):
        return {name: getattr(self, name) for name in ERROR_KEYS}


@dataclass(frozen=True)
class ParameterSet:
    """
    Population and design parameters of one survey configuration.

    N, mu_y2 and mu_x2 are optional: N only matters to operations that need
    a concrete population (popgen, sampling, variance_hh) and the stratum-2
    means only to popgen.
    """
    n: int
    W2: float
    k: float
    mu_y: float
    mu_x: float
    S_y: float
    S_x: float
    rho: float
    S_y2: float
    S_x2: float
    rho2: float
    N: Optional[int] = None
    mu_y2: Optional[float] = None
    mu_x2: Optional[float] = None
    errors: ErrorModel = field(default_factory=ErrorModel)

    @property
    def f(self):
        """Sampling fraction n/N, None when N is infinite."""
        if self.N is None:
            return None
        return self.n / self.N

    def without_errors(self):
        return dataclasses.replace(self, errors=ErrorModel())

    def without_nonresponse(self):
        return dataclasses.replace(self, W2=0.0)

    def to_dict(self):
        """Flat mapping in config key order."""
        values = {}
        for key in CONFIG_KEYS:
            if key in ERROR_KEYS:
                values[key] = getattr(self.errors, key)
            else:
                values[key] = getattr(self, key)
        return values

    @classmethod
    def from_dict(cls, mapping):
        """
        Build a ParameterSet from a flat config mapping.

        :param mapping: dictionary keyed by CONFIG_KEYS
        :return: ParameterSet (not yet validated)
        """
        unknown = sorted(set(mapping) - set(CONFIG_KEYS))
        if unknown:
            raise ConfigError('unknown key(s): {}'.format(', '.join(unknown)))

        values = {}
        for key in CONFIG_KEYS:
            raw = mapping.get(key)
            if raw is None:
                if key in _OPTIONAL_KEYS:
                    values[key] = None
                    continue
                raise ConfigError('missing required key: {}'.format(key))
            if isinstance(raw, bool) or not isinstance(raw, (int, float)):
                raise ConfigError('{} must be numeric, got {!r}'.format(key, raw))
            if key in _INTEGER_KEYS:
                if float(raw) != int(raw):
                    raise ConfigError('{} must be an integer, got {!r}'.format(key, raw))
                values[key] = int(raw)
            else:
                values[key] = float(raw)

        errors = ErrorModel(**{key: values.pop(key) for key in ERROR_KEYS})
        return cls(errors=errors, **values)


def _check_parameters(params):
    """Raise ParameterError on the first violated invariant."""
    if isinstance(params.n, bool) or int(params.n) != params.n or params.n < 2:
        raise ParameterError('n must be an integer >= 2, got {!r}'.format(params.n))

    for name in ('W2', 'k', 'mu_y', 'mu_x', 'S_y', 'S_x', 'rho',
                 'S_y2', 'S_x2', 'rho2'):
        if not _is_finite(getattr(params, name)):
            raise ParameterError('{} must be finite, got {!r}'.format(
                name, getattr(params, name)))
    for name in ('mu_y2', 'mu_x2'):
        value = getattr(params, name)
        if value is not None and not _is_finite(value):
            raise ParameterError('{} must be finite, got {!r}'.format(name, value))

    if not 0.0 <= params.W2 <= 1.0:
        raise ParameterError('W2 out of range [0, 1]: {!r}'.format(params.W2))
    if params.k < 1.0:
        raise ParameterError('k must be >= 1, got {!r}'.format(params.k))
    if params.mu_x == 0:
        raise ParameterError('mu_x must be nonzero for ratio estimation')
    if params.S_y <= 0:
        raise ParameterError('S_y must be > 0, got {!r}'.format(params.S_y))
    if params.S_x <= 0:
        raise ParameterError('S_x must be > 0, got {!r}'.format(params.S_x))
    if params.S_y2 < 0:
        raise ParameterError('S_y2 must be >= 0, got {!r}'.format(params.S_y2))
    if params.S_x2 < 0:
        raise ParameterError('S_x2 must be >= 0, got {!r}'.format(params.S_x2))
    if abs(params.rho) > 1:
        raise ParameterError('rho out of range [-1, 1]: {!r}'.format(params.rho))
    if abs(params.rho2) > 1:
        raise ParameterError('rho2 out of range [-1, 1]: {!r}'.format(params.rho2))
    if not isinstance(params.errors, ErrorModel):
        raise ParameterError('errors must be an ErrorModel')

    if params.N is not None:
        if isinstance(params.N, bool) or int(params.N) != params.N:
            raise ParameterError('N must be an integer, got {!r}'.format(params.N))
        if params.N < params.n:
            raise ParameterError('N must be >= n ({} < {})'.format(params.N, params.n))
        n2 = params.W2 * params.N
        if abs(n2 - round(n2)) > _INTEGRAL_TOL * params.N:
            raise ParameterError(
                'W2*N must be integral when N is finite ({}*{} = {})'.format(
                    params.W2, params.N, n2))


@dataclass(frozen=True)
class ValidatedParameterSet(ParameterSet):
    """A ParameterSet whose invariants hold, with R = mu_y/mu_x attached."""
    R: float = field(init=False, default=float('nan'))

    def __post_init__(self):
        _check_parameters(self)
        object.__setattr__(self, 'R', self.mu_y / self.mu_x)


def validate(params):
    """
    Check every ParameterSet invariant.

    :param params: ParameterSet
    :return: ValidatedParameterSet with R attached
    """
    if isinstance(params, ValidatedParameterSet):
        return params
    values = {f.name: getattr(params, f.name)
              for f in dataclasses.fields(ParameterSet)}
    return ValidatedParameterSet(**values)


def read_parameters(filename):
    """
    Load and validate a parameter config file.

    :param filename: YAML config path
    :return: ValidatedParameterSet
    """
    LOGGER.debug('loading parameters from: {}'.format(filename))
    mapping = validate_config_file(filename)
    return validate(ParameterSet.from_dict(mapping))


def write_parameters(params, filename):
    """
    Write a ParameterSet as a flat config file.

    :param params: ParameterSet
    :param filename: destination YAML path
    :return: None
    """
    utilities.write_yaml(filename, params.to_dict())


@dataclass(frozen=True, eq=False)
class FinitePopulation:
    """N units with true (X, Y) values and a fixed response stratum label."""
    x_true: np.ndarray
    y_true: np.ndarray
    stratum: np.ndarray

    def __post_init__(self):
        x_true = np.array(self.x_true, dtype=float)
        y_true = np.array(self.y_true, dtype=float)
        stratum = np.array(self.stratum, dtype=np.int8)
        if not (x_true.ndim == y_true.ndim == stratum.ndim == 1):
            raise ParameterError('population arrays must be one-dimensional')
        if not len(x_true) == len(y_true) == len(stratum):
            raise ParameterError('x_true, y_true and stratum lengths differ')
        bad = ~np.isin(stratum, (RESPONDENT, NONRESPONDENT))
        if bad.any():
            raise ParameterError('stratum labels must be 1 or 2')
        if not np.all(np.isfinite(x_true)) or not np.all(np.isfinite(y_true)):
            raise ParameterError('population values must be finite')
        if np.count_nonzero(stratum == RESPONDENT) < 1:
            raise ParameterError('N1 must be >= 1')
        for name, array in (('x_true', x_true), ('y_true', y_true),
                            ('stratum', stratum)):
            array.setflags(write=False)
            object.__setattr__(self, name, array)

    @property
    def N(self):
        return len(self.stratum)

    @property
    def N1(self):
        return int(np.count_nonzero(self.stratum == RESPONDENT))

    @property
    def N2(self):
        return int(np.count_nonzero(self.stratum == NONRESPONDENT))

    @property
    def W1(self):
        return self.N1 / self.N

    @property
    def W2(self):
        return self.N2 / self.N

    @property
    def X_bar(self):
        return math.fsum(self.x_true) / self.N

    @property
    def Y_bar(self):
        return math.fsum(self.y_true) / self.N

    def stratum_values(self, values, label):
        return values[self.stratum == label]

    def _stratum_mean(self, values, label):
        part = self.stratum_values(values, label)
        if len(part) == 0:
            return None
        return math.fsum(part) / len(part)

    def _stratum_var(self, values, label):
        part = self.stratum_values(values, label)
        if len(part) < 2:
            return 0.0
        mean = math.fsum(part) / len(part)
        return math.fsum((part - mean) ** 2) / (len(part) - 1)

    @property
    def Y1_bar(self):
        return self._stratum_mean(self.y_true, RESPONDENT)

    @property
    def Y2_bar(self):
        return self._stratum_mean(self.y_true, NONRESPONDENT)

    @property
    def X1_bar(self):
        return self._stratum_mean(self.x_true, RESPONDENT)

    @property
    def X2_bar(self):
        return self._stratum_mean(self.x_true, NONRESPONDENT)

    @property
    def S_y1_sq(self):
        return self._stratum_var(self.y_true, RESPONDENT)

    @property
    def S_y2_sq(self):
        return self._stratum_var(self.y_true, NONRESPONDENT)


@dataclass(frozen=True, eq=False)
class SampleRealization:
    """One two-phase draw: first-phase sample, response split, re-interviews."""
    sample_idx: np.ndarray
    respondent_idx: np.ndarray
    nonrespondent_idx: np.ndarray
    subsample_idx: np.ndarray
    y_obs_resp: np.ndarray
    x_obs_resp: np.ndarray
    y_obs_sub: np.ndarray
    x_obs_sub: np.ndarray

    def __post_init__(self):
        if self.n1 + self.n2 != self.n:
            raise ParameterError('n1 + n2 must equal n')
        if self.r > self.n2:
            raise ParameterError('subsample larger than the non-respondents')
        if self.n2 >= 1 and self.r < 1:
            raise ParameterError('r must be >= 1 when n2 >= 1')
        if not np.all(np.isin(self.subsample_idx, self.nonrespondent_idx)):
            raise ParameterError('subsample_idx must be within nonrespondent_idx')
        if len(self.y_obs_resp) != self.n1 or len(self.x_obs_resp) != self.n1:
            raise ParameterError('respondent observations must have n1 values')
        if len(self.y_obs_sub) != self.r or len(self.x_obs_sub) != self.r:
            raise ParameterError('subsample observations must have r values')

    @property
    def n(self):
        return len(self.sample_idx)

    @property
    def n1(self):
        return len(self.respondent_idx)

    @property
    def n2(self):
        return len(self.nonrespondent_idx)

    @property
    def r(self):
        return len(self.subsample_idx)

    @property
    def w1(self):
        return self.n1 / self.n

    @property
    def w2(self):
        return self.n2 / self.n

    @property
    def y1_bar(self):
        return float(np.mean(self.y_obs_resp)) if self.n1 else None

    @property
    def x1_bar(self):
        return float(np.mean(self.x_obs_resp)) if self.n1 else None

    @property
    def y2r_bar(self):
        return float(np.mean(self.y_obs_sub)) if self.r else None

    @property
    def x2r_bar(self):
        return float(np.mean(self.x_obs_sub)) if self.r else None


HHMeans = namedtuple('HHMeans', 'y_star, x_star')

EstimateSet = namedtuple(
    'EstimateSet', 't1, t_r, t_lr, t_p, t_prod, b_used, m1_used, m2_used')


@dataclass(frozen=True)
class DerivedMoments:
    """
    The scalars every first-order MSE is built from.

    Nq is the quadratic auxiliary term (named so it does not
    clash with the population size N).
    """
    A: float
    M: float
    Nq: float
    O: float
    R: float
    Ee0sq: float
    Ee1sq: float
    Ee0e1: float
    C_y: float
    C_x: float
    C_y2: float
    C_x2: float


@dataclass(frozen=True)
class MseDecomposition:
    """
    Additive split of an MSE by error source.

    base: errors zeroed and W2 = 0; without_error: errors zeroed;
    me_contribution = total - without_error;
    nr_contribution = without_error - base.
    srs_with_errors and nr_with_errors are the same split taken with the
    errors kept (value at W2 = 0, and total minus it).
    """
    total: float
    without_error: float
    me_contribution: float
    nr_contribution: float
    base: float
    srs_with_errors: float
    nr_with_errors: float

    def residual(self):
        return self.total - (self.base + self.me_contribution +
                             self.nr_contribution)

    def as_dict(self):
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class EstimatorRecord:
    """Empirical against theoretical behaviour of one estimator."""
    count: int
    empirical_mean: float
    empirical_bias: float
    empirical_mse: float
    theoretical_mse: float
    rel_deviation: float
    se_bias: float
    se_mse: float

    def __post_init__(self):
        bias_sq = self.empirical_bias ** 2
        if self.empirical_mse < bias_sq * (1.0 - 1e-9) - 1e-300:
            raise SimulationError(
                'empirical MSE {!r} below squared bias {!r}'.format(
                    self.empirical_mse, bias_sq))

    def as_dict(self):
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class MonteCarloReport:
    """Outcome of a Monte Carlo run, with the design echoed."""
    reps: int
    seed: int
    params: ValidatedParameterSet
    population_mean: float
    coefficients: Dict[str, float]
    records: Dict[str, EstimatorRecord]
    contrasts: Dict[str, Dict[str, float]]
    flagged: int

    def as_dict(self):
        return {
            'reps': self.reps,
            'seed': self.seed,
            'params': self.params.to_dict(),
            'population_mean': self.population_mean,
            'coefficients': dict(self.coefficients),
            'flagged': self.flagged,
            'estimators': {name: record.as_dict()
                           for name, record in self.records.items()},
            'contrasts': {name: dict(values)
                          for name, values in self.contrasts.items()},
        }
