# -*- coding: utf-8 -*-
#
# missingmass documentation build configuration file
#
# pylint: disable=c0103, c0413, e0401

import sys
import os

sys.path.insert(0, os.path.abspath('..'))

from missingmass import __version__

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.viewcode',
    'sphinx.ext.napoleon',
    'sphinx.ext.mathjax',
    'sphinx_autodoc_typehints',
    'myst_parser',
]

templates_path = ['_templates']

source_suffix = ['.rst', '.md']

master_doc = 'index'

project = 'missingmass'
copyright = '2026, Thierry Parmentelat'                 # pylint: disable=w0622
author = 'Thierry Parmentelat'

release = __version__
version = __version__

exclude_patterns = ['_build']

pygments_style = 'sphinx'

# numpy-style sections in docstrings are fine too
napoleon_numpy_docstring = True

# -- Options for HTML output ----------------------------------------------

html_theme = 'nature'
html_title = 'missingmass v' + version
htmlhelp_basename = 'missingmassdoc'

# -- Options for manual page output ---------------------------------------

man_pages = [
    (master_doc, 'missingmass', 'missingmass Documentation',
     [author], 1)
]
