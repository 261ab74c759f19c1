"""Build script.

The compiled kernel extension is optional: when Cython or a C compiler is
missing, the build falls back to the pure-Python wheel and the package
selects the pure kernels at import time.
"""

import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the speedup extension if possible, otherwise keep going."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            sys.stderr.write(
                "warning: building polystat._speedups failed (%s); "
                "installing with pure-Python kernels\n" % (exc,)
            )

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            sys.stderr.write(
                "warning: %s did not compile (%s); the pure-Python kernels "
                "will be used instead\n" % (ext.name, exc)
            )


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension("polystat._speedups", ["src/polystat/_speedups.pyx"])
    return cythonize([ext], language_level="3")


setup(
    ext_modules=extensions(),
    cmdclass={"build_ext": OptionalBuildExt},
)
