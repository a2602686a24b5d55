"""Build script for the optional compiled scan kernels.

The extension is marked optional: if no C toolchain is available the
package still installs and falls back to the pure-Python kernels at
import time (see asicboost.backend).
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = [
    Extension(
        "asicboost._speedups",
        ["src/asicboost/_speedups.pyx"],
        extra_compile_args=["-O3"],
        optional=True,
    )
]

if cythonize is not None:
    ext_modules = cythonize(
        extensions,
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
else:
    ext_modules = []

setup(ext_modules=ext_modules)
