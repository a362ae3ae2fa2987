"""Build the optional compiled dyadic kernel.

The package works without it (pure-Python fallback), so a missing Cython or
compiler only skips the extension.  Set SKEWBOX_NO_EXT=1 to skip it on purpose.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as e:  # compiler missing or failing
            print(f"skipping the compiled kernel: {e}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as e:
            print(f"skipping {ext.name}: {e}")


def extensions():
    if os.environ.get("SKEWBOX_NO_EXT", "") not in ("", "0"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension("skewbox._dyadic_ext", ["src/skewbox/_dyadic_ext.pyx"])
    return cythonize([ext], language_level=3, quiet=True)


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
