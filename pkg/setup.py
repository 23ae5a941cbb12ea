"""Build script: compiles the ADMM iteration kernel when Cython and a C
compiler are available, otherwise installs pure-Python (the solver falls back
to the NumPy kernel at import time)."""

from setuptools import setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/risbeam/admm/_kernel.pyx",
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "language_level": 3,
        },
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
