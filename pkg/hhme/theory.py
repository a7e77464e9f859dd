#!/usr/bin/env python
# -*- coding: utf-8 -*-

""" theory.py

Closed-form first-order bias and MSE of the estimators under Hansen-Hurwitz
subsampling of non-respondents with measurement error on both variables.

Every formula is a function of the scalars in DerivedMoments:

    A  = (k - 1) W2 / n
    M  = (S_y^2 + s_u^2)/n  + A (S_y2^2 + s_u2^2)
    Nq = (S_x^2 + s_v^2)/n  + A (S_x2^2 + s_v2^2)
    O  = rho S_x S_y / n    + A rho2 S_x2 S_y2

The finite population correction is ignored everywhere except in
variance_hh.
"""

import logging
from collections import namedtuple

from . import model
from .errors import TheoryError
from .model import DerivedMoments, MseDecomposition

__all__ = ['derive_moments', 'mse_t1', 'bias_t1', 'bias_tr', 'mse_tr',
           'b_opt', 'mse_tlr', 'mse_tlr_min', 'mse_tlr_no_error', 'mse_tp',
           'mse_tp_weights', 'm2_opt', 'mse_tp_min', 'bias_tprod', 'mse_tprod',
           'efficiency_report', 'variance_hh', 'decompose',
           'decomposition_table', 'ESTIMATOR_NAMES']

LOGGER = logging.getLogger('hhme')

ESTIMATOR_NAMES = ('t1', 't_r', 't_lr', 't_p')

EfficiencyReport = namedtuple(
    'EfficiencyReport', 'gain_vs_t1, gain_vs_tr, gain_vs_tprod, conditions_hold')


def _div(num, den):
    if den == 0:
        return float('nan')
    return num / den


def derive_moments(params):
    """
    Derive A, M, Nq, O, R, the relative-error moments and the C's.

    S^2 (1 + s^2/S^2) is evaluated as S^2 + s^2, which is also its limit
    when the stratum SD is zero.

    :param params: ParameterSet (validated on the way in)
    :return: DerivedMoments
    """
    p = model.validate(params)
    err = p.errors
    A = (p.k - 1.0) * p.W2 / p.n
    M = (p.S_y ** 2 + err.sigma_u_sq) / p.n + A * (p.S_y2 ** 2 + err.sigma_u2_sq)
    Nq = (p.S_x ** 2 + err.sigma_v_sq) / p.n + A * (p.S_x2 ** 2 + err.sigma_v2_sq)
    O = p.rho * p.S_x * p.S_y / p.n + A * p.rho2 * p.S_x2 * p.S_y2
    R = p.R
    mu_y_sq = p.mu_y ** 2
    return DerivedMoments(
        A=A, M=M, Nq=Nq, O=O, R=R,
        Ee0sq=_div(M, mu_y_sq),
        Ee1sq=_div(R * R * Nq, mu_y_sq),
        Ee0e1=_div(R * O, mu_y_sq),
        C_y=_div(p.S_y, p.mu_y),
        C_x=_div(p.S_x, p.mu_x),
        C_y2=_div(p.S_y2, p.mu_y),
        C_x2=_div(p.S_x2, p.mu_x))


def _require_auxiliary(moments):
    if not moments.Nq > 0:
        raise TheoryError('no auxiliary variation (Nq = {!r})'.format(moments.Nq))


def _min_mse(moments):
    # shared by t_lr and t_p so the two minima are the same float
    _require_auxiliary(moments)
    return moments.M - moments.O ** 2 / moments.Nq


def decompose(params, mse_fn):
    """
    Split an MSE into no-error, measurement-error and non-response parts.

    without_error zeroes the four error variances, base additionally sets
    W2 = 0; me and nr contributions are the successive differences so that
    base + me + nr = total.

    :param params: ValidatedParameterSet
    :param mse_fn: callable params -> MSE
    :return: MseDecomposition
    """
    p = model.validate(params)
    total = mse_fn(p)
    without_error = mse_fn(p.without_errors())
    base = mse_fn(p.without_errors().without_nonresponse())
    srs_with_errors = mse_fn(p.without_nonresponse())
    return MseDecomposition(
        total=total,
        without_error=without_error,
        me_contribution=total - without_error,
        nr_contribution=without_error - base,
        base=base,
        srs_with_errors=srs_with_errors,
        nr_with_errors=total - srs_with_errors)


def bias_t1(params):
    """t1 is unbiased for the population mean."""
    model.validate(params)
    return 0.0


def _mse_t1_total(params):
    return derive_moments(params).M


def mse_t1(params):
    """
    MSE of the Hansen-Hurwitz mean t1 = y*.

    total = M; for the no-error column this is S_y^2/n + A S_y2^2 and the
    measurement-error contribution s_u^2/n + A s_u2^2.

    :param params: ParameterSet
    :return: MseDecomposition
    """
    return decompose(params, _mse_t1_total)


def bias_tr(params):
    """First-order bias of the ratio estimator, (R Nq - O) / mu_x."""
    p = model.validate(params)
    m = derive_moments(p)
    return (m.R * m.Nq - m.O) / p.mu_x


def _mse_tr_total(params):
    m = derive_moments(params)
    return m.M + m.R ** 2 * m.Nq - 2.0 * m.R * m.O


def mse_tr(params):
    """
    MSE of the ratio estimator t_r = (y*/x*) X_bar: M + R^2 Nq - 2 R O.

    :param params: ParameterSet
    :return: MseDecomposition
    """
    return decompose(params, _mse_tr_total)


def b_opt(params):
    """
    MSE-optimal slope of the regression estimator, O / Nq.

    b is the slope multiplying (X_bar - x*), so without errors and
    non-response this is the classical rho S_y / S_x.

    :param params: ParameterSet
    :return: float
    """
    m = derive_moments(params)
    _require_auxiliary(m)
    return m.O / m.Nq


def mse_tlr(params, b):
    """
    MSE of t_lr = y* + b (X_bar - x*) for a given slope: M + b^2 Nq - 2 b O.

    :param params: ParameterSet
    :param b: slope
    :return: float
    """
    m = derive_moments(params)
    return m.M + b * b * m.Nq - 2.0 * b * m.O


def mse_tlr_min(params):
    """Minimum MSE of the regression estimator, M - O^2/Nq."""
    return _min_mse(derive_moments(params))


def mse_tlr_no_error(params, b):
    """mse_tlr with all four error variances set to zero."""
    return mse_tlr(model.validate(params).without_errors(), b)


def mse_tp(params, m2):
    """
    MSE of the class t_p = m1 y* + m2 (y*/x*) X_bar, first order.

    Only m2 enters: M + m2^2 R^2 Nq - 2 m2 R O.

    :param params: ParameterSet
    :param m2: weight on the ratio member
    :return: float
    """
    m = derive_moments(params)
    return m.M + m2 * m2 * m.R ** 2 * m.Nq - 2.0 * m2 * m.R * m.O


def mse_tp_weights(params, m1, m2):
    """
    First-order MSE of m1 y* + m2 (y*/x*) X_bar with unconstrained weights.

    With s = m1 + m2 the class member carries the bias (s - 1) mu_y:
    ((s - 1) mu_y)^2 + s^2 M + m2^2 R^2 Nq - 2 s m2 R O.

    :param params: ParameterSet
    :param m1: weight on y*
    :param m2: weight on the ratio member
    :return: float
    """
    p = model.validate(params)
    m = derive_moments(p)
    s = m1 + m2
    return (((s - 1.0) * p.mu_y) ** 2 + s * s * m.M +
            m2 * m2 * m.R ** 2 * m.Nq - 2.0 * s * m2 * m.R * m.O)


def m2_opt(params):
    """
    Optimal class weights, m2* = O / (R Nq) and m1* = 1 - m2*.

    :param params: ParameterSet
    :return: tuple (m1*, m2*)
    """
    m = derive_moments(params)
    _require_auxiliary(m)
    if m.R == 0:
        raise TheoryError('m2* is undefined when mu_y = 0 (R = 0)')
    m2 = m.O / (m.R * m.Nq)
    return 1.0 - m2, m2


def mse_tp_min(params):
    """Minimum MSE of the class, equal to the regression minimum."""
    return _min_mse(derive_moments(params))


def bias_tprod(params):
    """First-order bias of the product estimator, O / mu_x."""
    p = model.validate(params)
    return derive_moments(p).O / p.mu_x


def _mse_tprod_total(params):
    m = derive_moments(params)
    return m.M + m.R ** 2 * m.Nq + 2.0 * m.R * m.O


def mse_tprod(params):
    """
    MSE of the product estimator y* x* / X_bar: M + R^2 Nq + 2 R O.

    :param params: ParameterSet
    :return: MseDecomposition
    """
    return decompose(params, _mse_tprod_total)


def efficiency_report(params):
    """
    Gains of the optimal class member over t1, t_r and t_prod.

    The gains are the closed forms O^2/Nq, (R Nq - O)^2/Nq and
    (R Nq + O)^2/Nq; the flags re-derive each gain as a difference of two
    MSEs and check it is not negative beyond rounding.

    :param params: ParameterSet
    :return: EfficiencyReport
    """
    p = model.validate(params)
    m = derive_moments(p)
    _require_auxiliary(m)
    gain_vs_t1 = m.O ** 2 / m.Nq
    gain_vs_tr = (m.R * m.Nq - m.O) ** 2 / m.Nq
    gain_vs_tprod = (m.R * m.Nq + m.O) ** 2 / m.Nq

    floor = mse_tp_min(p)
    slack = 1e-9 * max(m.M, abs(floor))
    conditions = {
        'vs_t1': mse_t1(p).total - floor >= -slack,
        'vs_tr': mse_tr(p).total - floor >= -slack,
        'vs_tprod': mse_tprod(p).total - floor >= -slack,
    }
    if not all(conditions.values()):
        LOGGER.warning('efficiency condition failed: {}'.format(conditions))
    return EfficiencyReport(gain_vs_t1, gain_vs_tr, gain_vs_tprod, conditions)


def variance_hh(params):
    """
    Hansen-Hurwitz variance of y* without measurement error, fpc included:
    (1 - f) S_y^2 / n + W2 (k - 1) S_y2^2 / n.

    :param params: ParameterSet with N set
    :return: float
    """
    p = model.validate(params)
    if p.N is None:
        raise TheoryError('variance_hh requires finite N')
    return ((1.0 - p.f) * p.S_y ** 2 / p.n +
            p.W2 * (p.k - 1.0) * p.S_y2 ** 2 / p.n)


def decomposition_table(params):
    """
    Decompositions for the four estimators; t_lr and t_p use their minimum
    MSE, re-optimized at each configuration.

    :param params: ParameterSet
    :return: dict name -> MseDecomposition
    """
    p = model.validate(params)
    return {
        't1': mse_t1(p),
        't_r': mse_tr(p),
        't_lr': decompose(p, mse_tlr_min),
        't_p': decompose(p, mse_tp_min),
    }
