#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
# hhme documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.

import sys
import os

# Make the package importable for autodoc.
sys.path.insert(0, os.path.abspath('..'))
import hhme

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.intersphinx',
    'sphinx.ext.mathjax',
]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = u'hhme'
copyright = u'2026, hhme developers'
author = u'hhme developers'

version = hhme.__version__
release = version

language = None
exclude_patterns = ['_build']
pygments_style = 'sphinx'
todo_include_todos = False

# -- Options for HTML output ----------------------------------------------

html_theme = 'default'
html_static_path = []
htmlhelp_basename = 'hhmedoc'

# -- Options for manual page output ---------------------------------------

man_pages = [
    (master_doc, 'hhme', u'hhme Documentation',
     [author], 1)
]

autodoc_member_order = 'bysource'

intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
    'numpy': ('https://numpy.org/doc/stable/', None),
    'pandas': ('https://pandas.pydata.org/docs/', None),
}
