#!/usr/bin/env python
# -*- coding: utf-8 -*-
import logging
import sys

FORMAT = '%(asctime)s - %(levelname)s - %(module)s - %(message)s'


def _make_handler(logfile):
    # stdout carries the reports, logs never go there
    if logfile:
        return logging.FileHandler(logfile, 'w')
    return logging.StreamHandler(sys.stderr)


def _setup_logger(name, logfile, level, fmt=None):
    handler = _make_handler(logfile)
    if fmt:
        handler.setFormatter(logging.Formatter(fmt=fmt))

    logger = logging.getLogger(name)
    for old in list(logger.handlers):
        logger.removeHandler(old)
        old.close()
    logger.setLevel(level)
    logger.addHandler(handler)
    return logger


def setup_debug_logger(name, logfile):
    """
    Sets up the debug logger

    :param name: Name of the logger
    :param logfile: file to store the log to. sys.stderr if no file define
    :return: logger object

    """
    return _setup_logger(name, logfile, logging.DEBUG, fmt=FORMAT)


def setup_info_logger(name, logfile):
    """
    Sets up the info logger

    :param name: Name of the logger
    :param logfile: file to store the log to. sys.stderr if no file define
    :return: logger object

    """
    return _setup_logger(name, logfile, logging.INFO)
