#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""errors.py

Method related to errors and Custom Exceptions.
"""

__all__ = ['HhmeError', 'ParameterError', 'ConfigError', 'TheoryError',
           'PopulationError', 'SamplingError', 'RatioUndefinedError',
           'SimulationError', 'IngestError', 'ToleranceError']


# hhme error:
class HhmeError(Exception):
    """Basic exception for errors raised by hhme."""


# Parameter errors:
class ParameterError(HhmeError, ValueError):
    """Custom exception raised when a parameter invariant is violated."""
    def __init__(self, message):
        Exception.__init__(self, 'Invalid parameters: %s' % message)


class ConfigError(HhmeError):
    """Custom exception raised when a config file cannot be used."""
    def __init__(self, message):
        Exception.__init__(self, 'Error in config: %s' % message)


# Theory errors:
class TheoryError(HhmeError, ValueError):
    """Custom exception raised when a closed form is undefined."""
    def __init__(self, message):
        Exception.__init__(self, 'Error in theory: %s' % message)


# Population and sampling errors:
class PopulationError(HhmeError, ValueError):
    """Custom exception raised for an invalid population or its spec."""
    def __init__(self, message):
        Exception.__init__(self, 'Error in population: %s' % message)


class SamplingError(HhmeError, ValueError):
    """Custom exception raised for an invalid two-phase draw."""
    def __init__(self, message):
        Exception.__init__(self, 'Error in sampling: %s' % message)


class RatioUndefinedError(HhmeError, ArithmeticError):
    """Custom exception raised when x_star is too close to zero."""
    def __init__(self, x_star, x_bar):
        self.x_star = x_star
        self.x_bar = x_bar
        Exception.__init__(
            self, 'ratio-undefined: x_star=%r is negligible against '
                  'X_bar=%r' % (x_star, x_bar))


# Simulation errors:
class SimulationError(HhmeError):
    """Custom exception raised by the Monte Carlo engine."""
    def __init__(self, message):
        Exception.__init__(self, 'Error in simulation: %s' % message)


# Ingest errors:
class IngestError(HhmeError, ValueError):
    """Custom exception raised when a paired dataset cannot be used."""
    def __init__(self, message):
        Exception.__init__(self, 'Error in ingest: %s' % message)


# Command line:
class ToleranceError(HhmeError):
    """Custom exception raised when simulation strays from theory."""
    def __init__(self, failures, tol):
        self.failures = failures
        self.tol = tol
        names = ', '.join(failures)
        Exception.__init__(
            self, 'relative deviation above %g for: %s' % (tol, names))
