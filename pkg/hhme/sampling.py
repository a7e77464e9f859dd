#!/usr/bin/env python
# -*- coding: utf-8 -*-

""" sampling.py

One replication of the Hansen-Hurwitz two-phase scheme with measurement
error: SRSWOR first phase, response by fixed stratum, SRSWOR re-interview
subsample of the non-respondents, error-contaminated observation and the
HH means. Every operation takes an explicit numpy Generator.
"""

import numpy as np

from . import utilities
from .errors import SamplingError
from .model import HHMeans, NONRESPONDENT, SampleRealization

__all__ = ['draw_srswor', 'split_response', 'subsample_size',
           'subsample_nonrespondents', 'observe', 'draw_realization',
           'hh_means', 'replication_rng', 'error_sd_table',
           'replication_means']


def replication_rng(seed, index):
    """
    Independent Generator for one replication: the child stream
    (seed, index) of the master SeedSequence.

    :param seed: master seed
    :param index: replication index
    :return: numpy Generator
    """
    return np.random.default_rng(
        np.random.SeedSequence(seed, spawn_key=(int(index),)))


def draw_srswor(N, n, rng):
    """
    Simple random sample without replacement of n indices out of N.

    :return: sorted int array of size n
    """
    if n < 1 or n > N:
        raise SamplingError('cannot draw n={} units from N={}'.format(n, N))
    return np.sort(rng.choice(N, size=n, replace=False))


def split_response(sample_idx, pop):
    """
    Partition sampled units by their fixed response stratum.

    :return: (respondent_idx, nonrespondent_idx)
    """
    missing = pop.stratum[sample_idx] == NONRESPONDENT
    return sample_idx[~missing], sample_idx[missing]


def subsample_size(n2, k):
    """r = max(1, round_half_up(n2 / k)) when n2 >= 1, else 0."""
    if n2 == 0:
        return 0
    return min(n2, max(1, utilities.round_half_up(n2 / k)))


def subsample_nonrespondents(nonrespondent_idx, k, rng):
    """
    SRSWOR subsample of r = round_half_up(n2/k) (at least 1) non-respondents.

    :param nonrespondent_idx: indices of first-phase non-respondents
    :param k: inverse subsampling fraction, >= 1
    :param rng: numpy Generator
    :return: sorted int array of size r
    """
    if k < 1:
        raise SamplingError('k must be >= 1, got {!r}'.format(k))
    r = subsample_size(len(nonrespondent_idx), k)
    if r == 0:
        return nonrespondent_idx[:0]
    return np.sort(rng.choice(nonrespondent_idx, size=r, replace=False))


def error_sd_table(errors):
    """
    Error SDs of Y and X indexed by stratum label (entry 0 unused).

    :param errors: ErrorModel
    :return: (sd_u, sd_v) float arrays of length 3
    """
    sd_u = np.sqrt([0.0, errors.sigma_u_sq, errors.sigma_u2_sq])
    sd_v = np.sqrt([0.0, errors.sigma_v_sq, errors.sigma_v2_sq])
    return sd_u, sd_v


def observe(idx, pop, errors, rng, sd_table=None):
    """
    Measure units with fresh zero-mean Gaussian errors.

    Stratum-1 units get variances (s_u^2, s_v^2), stratum-2 units
    (s_u2^2, s_v2^2); u and v are drawn independently.

    :param sd_table: error_sd_table(errors), computed here when None
    :return: (x_measured, y_measured)
    """
    sd_u, sd_v = sd_table if sd_table is not None else error_sd_table(errors)
    labels = pop.stratum[idx]
    u = rng.standard_normal(len(idx)) * sd_u[labels]
    v = rng.standard_normal(len(idx)) * sd_v[labels]
    return pop.x_true[idx] + v, pop.y_true[idx] + u


def _draw(pop, n, k, errors, rng, sd_table):
    sample_idx = draw_srswor(pop.N, n, rng)
    respondent_idx, nonrespondent_idx = split_response(sample_idx, pop)
    subsample_idx = subsample_nonrespondents(nonrespondent_idx, k, rng)
    x_resp, y_resp = observe(respondent_idx, pop, errors, rng, sd_table)
    x_sub, y_sub = observe(subsample_idx, pop, errors, rng, sd_table)
    return (sample_idx, respondent_idx, nonrespondent_idx, subsample_idx,
            y_resp, x_resp, y_sub, x_sub)


def draw_realization(pop, n, k, errors, rng):
    """
    Run draw -> split -> subsample -> observe for one replication.

    :return: SampleRealization
    """
    (sample_idx, respondent_idx, nonrespondent_idx, subsample_idx,
     y_resp, x_resp, y_sub, x_sub) = _draw(pop, n, k, errors, rng, None)
    return SampleRealization(
        sample_idx=sample_idx, respondent_idx=respondent_idx,
        nonrespondent_idx=nonrespondent_idx, subsample_idx=subsample_idx,
        y_obs_resp=y_resp, x_obs_resp=x_resp, y_obs_sub=y_sub, x_obs_sub=x_sub)


def _combine(n1, n2, y_resp, x_resp, y_sub, x_sub):
    if n1 == 0 and n2 == 0:
        raise SamplingError('empty sample')
    if n2 == 0:
        return HHMeans(float(np.mean(y_resp)), float(np.mean(x_resp)))
    if n1 == 0:
        return HHMeans(float(np.mean(y_sub)), float(np.mean(x_sub)))
    w1 = n1 / (n1 + n2)
    w2 = n2 / (n1 + n2)
    return HHMeans(w1 * float(np.mean(y_resp)) + w2 * float(np.mean(y_sub)),
                   w1 * float(np.mean(x_resp)) + w2 * float(np.mean(x_sub)))


def hh_means(sample):
    """
    Hansen-Hurwitz means y* = w1 y1 + w2 y2r and x* alike.

    :param sample: SampleRealization
    :return: HHMeans
    """
    return _combine(sample.n1, sample.n2, sample.y_obs_resp, sample.x_obs_resp,
                    sample.y_obs_sub, sample.x_obs_sub)


def replication_means(pop, n, k, errors, rng, sd_table=None):
    """
    HH means of one replication without building a SampleRealization.

    Draws exactly what draw_realization draws, so
    hh_means(draw_realization(...)) gives the same floats.

    :param sd_table: error_sd_table(errors), shared across replications
    :return: (HHMeans, n1, n2, r)
    """
    if sd_table is None:
        sd_table = error_sd_table(errors)
    (_, respondent_idx, nonrespondent_idx, subsample_idx,
     y_resp, x_resp, y_sub, x_sub) = _draw(pop, n, k, errors, rng, sd_table)
    n1 = len(respondent_idx)
    n2 = len(nonrespondent_idx)
    return (_combine(n1, n2, y_resp, x_resp, y_sub, x_sub),
            n1, n2, len(subsample_idx))
