from setuptools import setup, Extension

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "dualbisect.milp._simplex_cy",
                ["src/dualbisect/milp/_simplex_cy.pyx"],
            )
        ],
        language_level=3,
    )
except ImportError:
    # Pure-python fallback is selected at import time when the
    # compiled kernel is missing.
    ext_modules = []

setup(ext_modules=ext_modules)
