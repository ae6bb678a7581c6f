import os

from setuptools import Extension, setup

_PYX = "src/allocdss/_kernels/_cumulative.pyx"
_C = "src/allocdss/_kernels/_cumulative.c"

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("allocdss._kernels._cumulative", [_PYX])],
        language_level=3,
    )
except ImportError:
    if os.path.exists(_C):
        # no Cython, but the pregenerated C ships with the source tree
        ext_modules = [Extension("allocdss._kernels._cumulative", [_C])]
    else:
        # nothing to compile from; the kernel package falls back at import
        ext_modules = []

setup(ext_modules=ext_modules)
