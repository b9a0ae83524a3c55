# -*- coding: utf-8 -*-
#
# pymsdem documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.

import sys
import os

# autodoc imports the package from the repository root
sys.path.insert(0, os.path.abspath('..'))

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.todo',
    'sphinx.ext.mathjax',
]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = u'pymsdem'
copyright = u'2026, the pymsdem developers'

# The short X.Y version.
version = '0.0'
# The full version, including alpha/beta/rc tags.
release = '0.0.1'

exclude_patterns = ['_build']
pygments_style = 'sphinx'

# optional dependencies need not be installed to build the docs
autodoc_mock_imports = ['h5py', 'matplotlib', 'trimesh', 'meshio']

# -- Options for HTML output ----------------------------------------------

on_rtd = os.environ.get('READTHEDOCS', None) == 'True'
if on_rtd:
    html_theme = 'default'
else:
    html_theme = 'nature'

html_static_path = []
htmlhelp_basename = 'pymsdemdoc'

# -- Options for LaTeX output ---------------------------------------------

latex_documents = [
    ('index', 'pymsdem.tex', u'pymsdem Documentation',
     u'the pymsdem developers', 'manual'),
]

# -- Options for manual page output ---------------------------------------

man_pages = [
    ('index', 'pymsdem', u'pymsdem Documentation',
     [u'the pymsdem developers'], 1)
]
