"""Builds the optional compiled kernel extension.

The package works without the extension (a NumPy fallback is selected at
import time), but the compiled core is markedly faster for the many small
per-window fits the batch pipeline performs.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "tailrisk._kernels._core",
                ["src/tailrisk/_kernels/_core.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
