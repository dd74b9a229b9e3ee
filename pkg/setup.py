"""Build hook for the optional compiled kernel.

The package is pure Python; a Cython extension accelerates the busy-period
fixed point.  When Cython (or a C compiler) is unavailable the build falls
back to the pure implementation and everything still works.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "impresched._kernels._speedups",
                ["src/impresched/_kernels/_speedups.pyx"],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
