"""Build script for the optional compiled kernel.

The extension is marked optional: if compilation fails the package still
installs and ``phasepom.kernels`` falls back to the numpy implementation.
"""
import sys

import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

openmp = [] if sys.platform == "darwin" else ["-fopenmp"]

extensions = [
    Extension(
        "phasepom._core",
        ["src/phasepom/_core.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"] + openmp,
        extra_link_args=openmp,
        optional=True,
    )
]

setup(
    ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}),
)
