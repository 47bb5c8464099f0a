import os

from setuptools import Extension, setup

# The simulation kernel is optional: the package falls back to a pure-Python
# implementation when the extension is missing (FEDLOAD_NO_EXT=1 skips it).
ext_modules = []
if os.environ.get("FEDLOAD_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("fedload.sim._kernel", ["src/fedload/sim/_kernel.pyx"])],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
