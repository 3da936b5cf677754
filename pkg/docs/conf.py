# This file only contains a selection of the most common options. For a full
# list see the documentation:
#
# https://www.sphinx-doc.org/en/master/usage/configuration.html


# -- Path setup --------------------------------------------------------------

import os
import sys

# Add parent directory so we can import mdlie
sys.path.insert(0, os.path.abspath('..'))

import mdlie  # noqa

# -- Project information -----------------------------------------------------

project = "mdlie"
copyright = "2026, mdlie contributors"
author = "mdlie contributors"


# -- General configuration -----------------------------------------------------

extensions = ['sphinx.ext.autodoc', 'sphinx.ext.viewcode', 'sphinx.ext.doctest']

exclude_patterns = ['_build']

# The short X.Y version.
version = mdlie.__version__
# The full version, including alpha/beta/rc tags.
release = mdlie.__version__ + ' ' + mdlie.__releasedate__

pygments_style = 'sphinx'

# Display the class docstring and __init__ docstring concatenated
autoclass_content = 'both'
autodoc_preserve_defaults = True


# -- Options for HTML output ---------------------------------------------------

html_theme = 'alabaster'

