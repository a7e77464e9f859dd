#!/usr/bin/env python
# -*- coding: utf-8 -*-

""" estimators.py

Point estimators of the population mean of Y from the Hansen-Hurwitz
means, with the true population mean of X known.

All functions work on scalars and, elementwise, on numpy arrays of HH means
(the Monte Carlo engine evaluates whole blocks at once).
"""

import numpy as np

from .errors import RatioUndefinedError
from .hhme_settings import RATIO_EPSILON
from .model import EstimateSet

__all__ = ['t1', 't_ratio', 't_regression', 't_proposed', 't_product',
           'ratio_defined', 'estimate_all']


def ratio_defined(x_star, X_bar, eps=RATIO_EPSILON):
    """True where |x*| > eps |X_bar|, elementwise."""
    return np.abs(x_star) > eps * abs(X_bar)


def _check_ratio(hh, X_bar, eps):
    ok = ratio_defined(hh.x_star, X_bar, eps)
    if not np.all(ok):
        bad = hh.x_star if np.ndim(ok) == 0 else np.asarray(hh.x_star)[~ok][0]
        raise RatioUndefinedError(bad, X_bar)


def t1(hh):
    """Usual unbiased estimator, the HH mean y* itself."""
    return hh.y_star


def t_ratio(hh, X_bar, eps=RATIO_EPSILON):
    """
    Ratio estimator (y*/x*) X_bar.

    :raises RatioUndefinedError: when x* is negligible against X_bar
    """
    _check_ratio(hh, X_bar, eps)
    return hh.y_star / hh.x_star * X_bar


def t_regression(hh, X_bar, b):
    """Regression estimator y* + b (X_bar - x*)."""
    return hh.y_star + b * (X_bar - hh.x_star)


def t_proposed(hh, X_bar, m1, m2, eps=RATIO_EPSILON):
    """
    Class m1 y* + m2 (y*/x*) X_bar.

    (1, 0) gives t1 and (0, 1) the ratio estimator; m1 + m2 is not forced
    to 1 here.
    """
    if m2 == 0:
        return m1 * hh.y_star
    return m1 * hh.y_star + m2 * t_ratio(hh, X_bar, eps)


def t_product(hh, X_bar):
    """Product estimator y* x* / X_bar."""
    return hh.y_star * hh.x_star / X_bar


def estimate_all(hh, X_bar, b, m1, m2, eps=RATIO_EPSILON):
    """
    Evaluate every estimator on one set of HH means.

    :return: EstimateSet
    """
    return EstimateSet(
        t1=t1(hh), t_r=t_ratio(hh, X_bar, eps), t_lr=t_regression(hh, X_bar, b),
        t_p=t_proposed(hh, X_bar, m1, m2, eps), t_prod=t_product(hh, X_bar),
        b_used=b, m1_used=m1, m2_used=m2)
