"""Optional compiled kernel.  Without Cython or a C compiler the pure-Python backend is used."""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("APPLIED_LAMBDA_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("applied_lambda._ckernel", ["src/applied_lambda/_ckernel.pyx"])],
            compiler_directives={"language_level": "3"},
            quiet=True,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
