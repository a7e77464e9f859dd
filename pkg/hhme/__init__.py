# flake8: noqa
# -*- coding: utf-8 -*-
# emacs: -*- mode: python; py-indent-offset: 4; indent-tabs-mode: nil -*-
# vi: set ft=python sts=4 ts=4 sw=4 et:

from . import bin
from . import log
from . import estimators
from . import ingest
from . import montecarlo
from . import popgen
from . import reference
from . import sampling
from . import theory

from .hhme_settings import HHME_Settings
from .model import (ErrorModel, ParameterSet, ValidatedParameterSet,
                    FinitePopulation, read_parameters, write_parameters)
from .montecarlo import RunConfig
from .popgen import PopulationSpec
from .version import VERSION as __version__
