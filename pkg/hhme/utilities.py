import math

import yaml

from .errors import ConfigError


def read_yaml(yaml_file):
    """Function to read a yaml file and return the document info

    :param yaml_file: yaml file path
    """
    try:
        with open(yaml_file, "r") as yaml_stream:
            return yaml.safe_load(yaml_stream)
    except IOError as exc:
        err = 'YAML File {} could not be opened. Error: {}'
        raise ConfigError(err.format(yaml_file, exc))
    except yaml.error.YAMLError as exc:
        err = 'YAML File {} could not be loaded properly. Error: {}'
        raise ConfigError(err.format(yaml_file, exc))


def dump_yaml(contents):
    """
    Flat mapping as a yaml document, keeping the key order given.

    :param contents: dictionary to dump
    :return: yaml string
    """
    return yaml.safe_dump(contents, default_flow_style=False, sort_keys=False)


def write_yaml(yaml_file, contents):
    """
    Write a flat mapping to a yaml file.

    :param yaml_file: yaml file path
    :param contents: dictionary to dump
    :return: None
    """
    with open(yaml_file, "w") as yaml_stream:
        yaml_stream.write(dump_yaml(contents))


def round_half_up(value):
    """
    Round a non-negative real to the nearest integer, halves going up.

    :param value: non-negative float
    :return: int
    """
    return int(math.floor(value + 0.5))


def relative_difference(actual, expected):
    """
    Relative difference of actual against expected.

    :param actual: observed value
    :param expected: reference value
    :return: |actual - expected| / |expected|, or the absolute difference
     when expected is zero
    """
    diff = abs(actual - expected)
    if expected == 0:
        return diff
    return diff / abs(expected)


def is_close_rel(actual, expected, rtol):
    return relative_difference(actual, expected) <= rtol
