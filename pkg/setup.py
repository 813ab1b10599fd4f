"""Build script: compiles the optional Cython kernel extension.

The package is fully functional without the extension (a numpy fallback is
selected at import time), so any failure here is non-fatal: we simply ship
the pure-Python wheel.  Build in place with

    python3 setup.py build_ext --inplace
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/regchar/_kernels.pyx"],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except Exception as exc:  # Cython missing or cythonization failed
    print(f"regchar: skipping compiled kernels ({exc}); numpy fallback will be used")

setup(ext_modules=ext_modules)
