"""Build script: compiles the optional Cython jet-kernel extension.

The package is fully functional without the extension (a pure-numpy
implementation of the same kernels is selected at import time), so any
failure here is non-fatal: we fall back to a pure-Python install.
"""

import sys

from setuptools import setup


def extensions():
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError as exc:
        print(f"hiddenpde: Cython/numpy unavailable ({exc}); "
              "building without the compiled jet kernels", file=sys.stderr)
        return []
    ext = Extension(
        "hiddenpde._jetcore",
        ["src/hiddenpde/_jetcore.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=extensions())
