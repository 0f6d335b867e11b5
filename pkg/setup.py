"""Build script: compiles the stepping kernel when Cython is available.

Without Cython the install still succeeds; the package then falls back to
the pure-NumPy kernel at import time.  -ffp-contract=off keeps the compiled
kernel bit-identical to the NumPy fallback (no FMA contraction).
"""

from setuptools import setup

try:
    from Cython.Build import cythonize
    from setuptools import Extension

    extensions = cythonize(
        [
            Extension(
                "coulombsim._core",
                ["src/coulombsim/_core.pyx"],
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
