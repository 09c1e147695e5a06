from setuptools import setup, Extension

import numpy as np
from Cython.Build import cythonize

ext = Extension(
    "gptemper._covfill",
    ["src/gptemper/_covfill.pyx"],
    include_dirs=[np.get_include()],
)

setup(ext_modules=cythonize(ext, language_level=3))
