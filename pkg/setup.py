"""Build script for the optional compiled Monte-Carlo kernel.

The package works without the extension: ``stcmmimo.kernels`` falls back to
the vectorized numpy implementation when ``stcmmimo._ber_core`` is missing.
"""

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "stcmmimo._ber_core",
                ["src/stcmmimo/_ber_core.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
