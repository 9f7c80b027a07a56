"""Build script: compiles the optional Cython statevector kernels.

The package works without the extension (a NumPy fallback is selected at
import time), so a failed or skipped extension build is not fatal.
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("qstack.kernels._cykernels", ["src/qstack/kernels/_cykernels.pyx"])],
        compiler_directives={"language_level": 3, "boundscheck": False, "wraparound": False},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
