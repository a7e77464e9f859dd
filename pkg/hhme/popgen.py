#!/usr/bin/env python
# -*- coding: utf-8 -*-

""" popgen.py

Synthetic finite populations whose stratum means, SDs (divisor size - 1)
and correlations equal the requested values exactly, so the theory can be
checked against a simulation with known truth.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import pandas as pd

from . import model
from .errors import PopulationError
from .model import FinitePopulation, RESPONDENT, NONRESPONDENT

__all__ = ['PopulationSpec', 'StratumMoments', 'PopulationMoments',
           'generate_population', 'population_moments',
           'spec_from_parameters', 'write_population_csv']

LOGGER = logging.getLogger('hhme')

MIN_STRATUM_SIZE = 3
_MAX_REDRAWS = 10


@dataclass(frozen=True)
class PopulationSpec:
    """Per-stratum targets of a two-stratum (response / non-response) population."""
    N: int
    W2: float
    mu_x1: float
    mu_y1: float
    mu_x2: float
    mu_y2: float
    S_x1: float
    S_y1: float
    S_x2: float
    S_y2: float
    rho1: float
    rho2: float

    def __post_init__(self):
        if isinstance(self.N, bool) or int(self.N) != self.N or self.N < 1:
            raise PopulationError('N must be a positive integer, got {!r}'.format(self.N))
        if not 0.0 <= self.W2 < 1.0:
            raise PopulationError('W2 must be in [0, 1), got {!r}'.format(self.W2))
        n2 = self.W2 * self.N
        if abs(n2 - round(n2)) > 1e-9 * self.N:
            raise PopulationError('N*W2 must be integral ({}*{} = {})'.format(
                self.N, self.W2, n2))
        for name in ('S_x1', 'S_y1', 'S_x2', 'S_y2'):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise PopulationError('{} must be >= 0, got {!r}'.format(name, value))
        for name in ('rho1', 'rho2'):
            value = getattr(self, name)
            if not math.isfinite(value) or abs(value) > 1:
                raise PopulationError('{} out of range [-1, 1]: {!r}'.format(name, value))
        for name in ('mu_x1', 'mu_y1', 'mu_x2', 'mu_y2'):
            if not math.isfinite(getattr(self, name)):
                raise PopulationError('{} must be finite'.format(name))
        if self.N1 < MIN_STRATUM_SIZE:
            raise PopulationError('response stratum has {} units, needs >= {}'.format(
                self.N1, MIN_STRATUM_SIZE))
        if 0 < self.N2 < MIN_STRATUM_SIZE:
            raise PopulationError('non-response stratum has {} units, needs 0 or >= {}'.format(
                self.N2, MIN_STRATUM_SIZE))

    @property
    def N2(self):
        return int(round(self.W2 * self.N))

    @property
    def N1(self):
        return self.N - self.N2

    def stratum(self, label):
        """(size, mu_x, mu_y, S_x, S_y, rho) of one stratum."""
        if label == RESPONDENT:
            return (self.N1, self.mu_x1, self.mu_y1, self.S_x1, self.S_y1, self.rho1)
        return (self.N2, self.mu_x2, self.mu_y2, self.S_x2, self.S_y2, self.rho2)


def _unit_scores(values):
    """Centre and scale to unit SD (divisor size - 1); None if constant."""
    centred = values - values.mean()
    ss = float(np.dot(centred, centred))
    if ss == 0.0:
        return None
    return centred / math.sqrt(ss / (len(values) - 1))


def _exact_stratum(rng, size, mu_x, mu_y, S_x, S_y, rho):
    for _ in range(_MAX_REDRAWS):
        z = rng.standard_normal((size, 2))
        a = _unit_scores(z[:, 0])
        if a is None:
            continue
        if abs(rho) == 1.0:
            # exact colinear construction, no residual direction needed
            y_std = math.copysign(1.0, rho) * a
        else:
            b = z[:, 1] - z[:, 1].mean()
            b = b - (np.dot(a, b) / np.dot(a, a)) * a
            b = _unit_scores(b)
            if b is None:
                continue
            y_std = rho * a + math.sqrt(1.0 - rho * rho) * b
        return mu_x + S_x * a, mu_y + S_y * y_std
    raise PopulationError('could not draw a non-degenerate stratum of size {}'.format(size))


def generate_population(spec, seed):
    """
    Build a FinitePopulation matching spec exactly, deterministic in seed.

    Each stratum starts from standard Gaussian pairs which are de-meaned,
    whitened by Gram-Schmidt, re-correlated, re-scaled and re-meaned.

    :param spec: PopulationSpec
    :param seed: integer seed
    :return: FinitePopulation (respondents first)
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    xs, ys, labels = [], [], []
    for label in (RESPONDENT, NONRESPONDENT):
        size, mu_x, mu_y, S_x, S_y, rho = spec.stratum(label)
        if size == 0:
            continue
        x, y = _exact_stratum(rng, size, mu_x, mu_y, S_x, S_y, rho)
        xs.append(x)
        ys.append(y)
        labels.append(np.full(size, label, dtype=np.int8))

    LOGGER.info('generated population N={} (N1={}, N2={}) seed={}'.format(
        spec.N, spec.N1, spec.N2, seed))
    return FinitePopulation(x_true=np.concatenate(xs), y_true=np.concatenate(ys),
                            stratum=np.concatenate(labels))


@dataclass(frozen=True)
class StratumMoments:
    size: int
    mu_x: Optional[float]
    mu_y: Optional[float]
    S_x: float
    S_y: float
    rho: Optional[float]


@dataclass(frozen=True)
class PopulationMoments:
    """Overall and per-stratum moments of a FinitePopulation."""
    N: int
    N1: int
    N2: int
    W1: float
    W2: float
    overall: StratumMoments
    respondents: StratumMoments
    nonrespondents: StratumMoments

    def to_parameters(self, n, k, errors=None, finite=True):
        """
        Parameter set for the theory, taken from the realized population.

        :param n: sample size
        :param k: inverse subsampling fraction
        :param errors: ErrorModel, none by default
        :param finite: echo N into the parameter set
        :return: ValidatedParameterSet
        """
        if errors is None:
            errors = model.ErrorModel()
        if self.overall.rho is None:
            raise PopulationError('overall correlation is undefined')
        second = self.nonrespondents
        return model.validate(model.ParameterSet(
            n=n, N=self.N if finite else None, W2=self.W2, k=k,
            mu_y=self.overall.mu_y, mu_x=self.overall.mu_x,
            S_y=self.overall.S_y, S_x=self.overall.S_x, rho=self.overall.rho,
            S_y2=second.S_y, S_x2=second.S_x,
            rho2=second.rho if second.rho is not None else 0.0,
            mu_y2=second.mu_y, mu_x2=second.mu_x, errors=errors))


def _moments(x, y):
    size = len(x)
    if size == 0:
        return StratumMoments(0, None, None, 0.0, 0.0, None)
    mu_x = math.fsum(x) / size
    mu_y = math.fsum(y) / size
    if size < 2:
        return StratumMoments(size, mu_x, mu_y, 0.0, 0.0, None)
    dx = x - mu_x
    dy = y - mu_y
    S_x = math.sqrt(math.fsum(dx * dx) / (size - 1))
    S_y = math.sqrt(math.fsum(dy * dy) / (size - 1))
    rho = None
    if S_x > 0 and S_y > 0:
        rho = math.fsum(dx * dy) / (size - 1) / (S_x * S_y)
        rho = max(-1.0, min(1.0, rho))
    return StratumMoments(size, mu_x, mu_y, S_x, S_y, rho)


def population_moments(pop):
    """
    Overall and per-stratum means, SDs (divisor size - 1) and correlations.

    A correlation is None when either SD is zero.

    :param pop: FinitePopulation with N >= 2
    :return: PopulationMoments
    """
    if pop.N < 2:
        raise PopulationError('population_moments needs N >= 2')
    first = pop.stratum == RESPONDENT
    second = pop.stratum == NONRESPONDENT
    return PopulationMoments(
        N=pop.N, N1=pop.N1, N2=pop.N2, W1=pop.W1, W2=pop.W2,
        overall=_moments(pop.x_true, pop.y_true),
        respondents=_moments(pop.x_true[first], pop.y_true[first]),
        nonrespondents=_moments(pop.x_true[second], pop.y_true[second]))


def _within_first(total_ss, second_ss, between, label):
    ss = total_ss - second_ss - between
    if ss < 0:
        if ss < -1e-12 * max(total_ss, 1.0):
            raise PopulationError(
                'overall {} is too small for the non-response stratum '
                'and the stratum means'.format(label))
        ss = 0.0
    return ss


def spec_from_parameters(params):
    """
    Invert the law of total mean, variance and covariance: the stratum-1
    targets that, together with the stratum-2 targets, give the overall
    mu, S and rho of params.

    :param params: ParameterSet with N, mu_y2 and mu_x2 set
    :return: PopulationSpec
    """
    p = model.validate(params)
    if p.N is None:
        raise PopulationError('a population needs finite N')

    N = p.N
    N2 = int(round(p.W2 * N))
    N1 = N - N2
    if N2 == 0:
        return PopulationSpec(
            N=N, W2=0.0, mu_x1=p.mu_x, mu_y1=p.mu_y,
            mu_x2=p.mu_x2 if p.mu_x2 is not None else 0.0,
            mu_y2=p.mu_y2 if p.mu_y2 is not None else 0.0,
            S_x1=p.S_x, S_y1=p.S_y, S_x2=0.0, S_y2=0.0, rho1=p.rho, rho2=0.0)
    if p.mu_y2 is None or p.mu_x2 is None:
        raise PopulationError('mu_y2 and mu_x2 are required to build a population')
    if N1 < 2:
        raise PopulationError('response stratum too small: N1 = {}'.format(N1))

    mu_y1 = (N * p.mu_y - N2 * p.mu_y2) / N1
    mu_x1 = (N * p.mu_x - N2 * p.mu_x2) / N1

    ss_y1 = _within_first(
        (N - 1) * p.S_y ** 2, (N2 - 1) * p.S_y2 ** 2,
        N1 * (mu_y1 - p.mu_y) ** 2 + N2 * (p.mu_y2 - p.mu_y) ** 2, 'S_y')
    ss_x1 = _within_first(
        (N - 1) * p.S_x ** 2, (N2 - 1) * p.S_x2 ** 2,
        N1 * (mu_x1 - p.mu_x) ** 2 + N2 * (p.mu_x2 - p.mu_x) ** 2, 'S_x')
    sp_1 = ((N - 1) * p.rho * p.S_x * p.S_y
            - (N2 - 1) * p.rho2 * p.S_x2 * p.S_y2
            - N1 * (mu_x1 - p.mu_x) * (mu_y1 - p.mu_y)
            - N2 * (p.mu_x2 - p.mu_x) * (p.mu_y2 - p.mu_y))

    S_y1 = math.sqrt(ss_y1 / (N1 - 1))
    S_x1 = math.sqrt(ss_x1 / (N1 - 1))
    if S_x1 > 0 and S_y1 > 0:
        rho1 = sp_1 / math.sqrt(ss_x1 * ss_y1)
    else:
        rho1 = 0.0
    if abs(rho1) > 1.0 + 1e-12:
        raise PopulationError('implied response-stratum correlation {:.6f} '
                              'is outside [-1, 1]'.format(rho1))
    rho1 = max(-1.0, min(1.0, rho1))

    return PopulationSpec(
        N=N, W2=N2 / N, mu_x1=mu_x1, mu_y1=mu_y1, mu_x2=p.mu_x2, mu_y2=p.mu_y2,
        S_x1=S_x1, S_y1=S_y1, S_x2=p.S_x2, S_y2=p.S_y2, rho1=rho1, rho2=p.rho2)


def write_population_csv(pop, filename):
    """Dump a population as CSV with columns x_true, y_true, stratum."""
    frame = pd.DataFrame({'x_true': pop.x_true, 'y_true': pop.y_true,
                          'stratum': pop.stratum.astype(int)})
    frame.to_csv(filename, index=False, float_format='%.17g')
