# Sphinx configuration for the symtrunc documentation.

import os
import sys

sys.path.insert(0, os.path.abspath('../..'))

from symtrunc import __version__  # noqa: E402

project = 'symtrunc'
author = 'symtrunc developers'
release = __version__

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.napoleon',
    'sphinx.ext.viewcode',
]

# Docstrings are numpy style throughout
napoleon_google_docstring = False
napoleon_numpy_docstring = True

autodoc_default_options = {
    'members': True,
    'show-inheritance': True,
}
autodoc_member_order = 'bysource'

html_theme = 'sphinx_rtd_theme'
