#!/usr/bin/env python
# -*- coding: utf-8 -*-

""" setup.py

Packaging for hhme
"""

from glob import glob
import os
from setuptools import setup, find_packages


def get_version():
    basedir = os.path.dirname(__file__)
    with open(os.path.join(basedir, 'hhme/version.py')) as f:
        VERSION = None
        version_ns = {}
        exec(f.read(), version_ns)
        VERSION = version_ns['VERSION']
        return VERSION
    raise RuntimeError("No version found")


description = 'Mean estimators under non-response and measurement error'

# Note: this long_description is a short version of the top-level README.md,
# keep the two in sync.
long_description = """
========================================================
hhme: Hansen-Hurwitz subsampling with measurement error
========================================================

*hhme* estimates a finite-population mean when part of the sample does not
respond at the first attempt (Hansen-Hurwitz re-interview subsampling) and
both the study and the auxiliary variable are measured with error.

*hhme* allows you to:

* compute first-order bias and MSE of the usual, ratio, regression, product
  and combined-class estimators, split by error source
* build finite populations with exact stratum moments
* check the closed forms with seeded, parallel Monte Carlo runs
* estimate the parameters from a paired true/measured dataset
* compare against the published survey table (hhme reproduce)
"""

NAME = 'hhme'
MAINTAINER = 'hhme developers'
MAINTAINER_EMAIL = 'hhme-dev@users.noreply.github.com'
DESCRIPTION = description
LONG_DESCRIPTION = long_description
LICENSE = 'MIT'
CLASSIFIERS = [
    # As from http://pypi.python.org/pypi?%3Aaction=list_classifiers
    "Development Status :: 4 - Beta",
    "Environment :: Console",
    "Intended Audience :: Science/Research",
    "Operating System :: MacOS :: MacOS X",
    "Operating System :: POSIX",
    "Operating System :: POSIX :: Linux",
    "Operating System :: Unix",
    "Programming Language :: Python :: 3",
    "Topic :: Scientific/Engineering",
    "Topic :: Scientific/Engineering :: Mathematics"]
AUTHOR = MAINTAINER
AUTHOR_EMAIL = MAINTAINER_EMAIL
PLATFORMS = ["MacOs",
             "Linux"]
VERSION = get_version()

# versions
SPHINX_MIN_VERSION = '4'
NUMPY_MIN_VERSION = '1.17'
PANDAS_MIN_VERSION = '1.1.5'

REQUIRES = [
    'numpy>=%s' % NUMPY_MIN_VERSION,
    'pandas>=%s' % PANDAS_MIN_VERSION,
    'pyyaml',
    'yamale']

DOCS_REQUIRES = [
    'Sphinx>=%s' % SPHINX_MIN_VERSION]

TESTS_REQUIRES = ['pytest']


if __name__ == '__main__':
    setup(name=NAME,
          maintainer=MAINTAINER,
          maintainer_email=MAINTAINER_EMAIL,
          version=get_version(),
          description=DESCRIPTION,
          long_description=LONG_DESCRIPTION,
          author=AUTHOR,
          author_email=AUTHOR_EMAIL,
          platforms=PLATFORMS,
          license=LICENSE,
          packages=find_packages(),
          include_package_data=True,
          package_data={'hhme': ['schema/*.yaml']},
          tests_require=TESTS_REQUIRES,
          install_requires=REQUIRES,
          python_requires='>=3.7',
          zip_safe=False,
          scripts=glob(os.path.join('bin', '*', '*')),
          classifiers=CLASSIFIERS,
          extras_require={
              'docs': DOCS_REQUIRES,
              'tests': TESTS_REQUIRES,
          })
