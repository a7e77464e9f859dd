import os

from .errors import ConfigError

# Environment
SEED_ENV_VAR = 'HHME_SEED'
DEFAULT_SEED = 20140101

# Monte Carlo engine
BLOCK_SIZE = 500
RATIO_EPSILON = 1e-9
FLAGGED_ABORT_FRACTION = 0.01
CSV_ROW_CAP = 100000
CONSISTENCY_RTOL = 1e-6

# Command line
DEFAULT_TOLERANCE = 0.05
DEFAULT_REPS = 10000
DEFAULT_GRID_HALF_WIDTH = 0.5
DEFAULT_GRID_STEP = 0.01

# Ingest
DEFAULT_INGEST_K = 2.0

# Report schema
JSON_SCHEMA_VERSION = '1'


class HHME_Settings(object):
    def __init__(self, environ=None):
        if environ is None:
            environ = os.environ
        self.environ = environ

    def get_default_seed(self):
        value = self.environ.get(SEED_ENV_VAR)
        if value is None or value.strip() == '':
            return DEFAULT_SEED
        try:
            seed = int(value, 0)
        except ValueError:
            msg = '{} must be an integer, got {!r}'
            raise ConfigError(msg.format(SEED_ENV_VAR, value))
        if seed < 0 or seed >= 2 ** 64:
            msg = '{} must fit in an unsigned 64-bit integer'
            raise ConfigError(msg.format(SEED_ENV_VAR))
        return seed

    def get_default_workers(self):
        return 0

    def resolve_workers(self, workers):
        if workers is None or workers <= 0:
            return os.cpu_count() or 1
        return workers

    def get_block_size(self):
        return BLOCK_SIZE

    def get_ratio_epsilon(self):
        return RATIO_EPSILON

    def get_flagged_abort_fraction(self):
        return FLAGGED_ABORT_FRACTION

    def get_csv_row_cap(self):
        return CSV_ROW_CAP

    def get_consistency_rtol(self):
        return CONSISTENCY_RTOL

    def get_default_tolerance(self):
        return DEFAULT_TOLERANCE

    def get_default_reps(self):
        return DEFAULT_REPS

    def get_default_grid(self):
        return DEFAULT_GRID_HALF_WIDTH, DEFAULT_GRID_STEP

    def get_default_ingest_k(self):
        return DEFAULT_INGEST_K

    def get_json_schema_version(self):
        return JSON_SCHEMA_VERSION
