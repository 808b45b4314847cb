"""Build hook: compiles the optional clipping kernel if Cython is present.

The package works without the extension (a pure-Python twin is selected at
import time), so any build failure here is non-fatal.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension
    import numpy

    ext_modules = cythonize(
        [
            Extension(
                "curlab._clipcore",
                ["src/curlab/_clipcore.pyx"],
                include_dirs=[numpy.get_include()],
            )
        ],
        language_level=3,
    )
except Exception:
    ext_modules = []

setup(ext_modules=ext_modules)
