import os

import yamale

from .errors import ConfigError

SCHEMA_FILE = os.path.realpath(os.path.join(
    os.path.dirname(__file__), 'schema', 'parameters.yaml'))


def validate(filename):
    """
    Check a parameter config file against the yamale schema.

    :param filename: path to the YAML config
    :return: the parsed mapping
    """
    # Load the schema
    try:
        schema = yamale.make_schema(SCHEMA_FILE)
    except Exception as err:
        raise ConfigError('failed to read schema:{}:{}'.format(SCHEMA_FILE, err))

    # Load the file to be validated
    try:
        data = yamale.make_data(filename)
    except Exception as err:
        raise ConfigError('failed to read file:{}:{}'.format(filename, err))

    if not data or not isinstance(data[0][0], dict):
        raise ConfigError('{} is not a key/value mapping'.format(filename))

    # Validate data against the schema
    try:
        yamale.validate(schema, data)
    except ValueError as err:
        raise ConfigError('validate failed:{}:{}'.format(filename, err))

    return data[0][0]
