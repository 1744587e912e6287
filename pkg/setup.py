"""Build script for the optional compiled event-loop kernel.

The package works without the extension: ``hviosc.sim`` falls back to a
pure-python kernel with the same semantics, so a failed compile must not
abort the install.
"""
import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover - toolchain dependent
            print(f"warning: {ext.name} failed to compile ({exc}); "
                  "the pure-python kernel will be used")


def extensions():
    if os.environ.get("HVIOSC_NO_EXT"):
        return []
    if not os.path.exists("src/hviosc/_kernel.pyx"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:  # pragma: no cover - cython not installed
        return []
    ext = Extension(
        "hviosc._kernel",
        sources=["src/hviosc/_kernel.pyx"],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
