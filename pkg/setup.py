"""Build the optional compiled kernel; the package works without it."""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("SHEAFMORSE_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:  # pure-Python install
        pass
    else:
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("sheafmorse._kernel", ["src/sheafmorse/_kernel.pyx"])],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
