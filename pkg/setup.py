"""Build script: compiles the optional chain kernel extension.

Set VERSPACE_NO_EXT=1 to skip the compiled kernel; the package then runs on
the pure-python fallback selected at import time.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("VERSPACE_NO_EXT"):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools.extension import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "verspace._ess_cy",
                    ["src/verspace/_ess_cy.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
