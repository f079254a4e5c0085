import os
import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the fast kernels when possible; the pure-Python backend covers
    the rest, so a missing compiler only costs speed, not functionality."""

    def run(self):
        try:
            super().run()
        except Exception as exc:
            warnings.warn(f"compiled kernels unavailable ({exc}); falling back to pure Python")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"building {ext.name} failed ({exc}); falling back to pure Python")


def extensions():
    from Cython.Build import cythonize

    flags = []
    if os.name == "posix":
        # -ffp-contract=off: no FMA contraction, so the compiled dot product
        # performs exactly the same roundings as the pure-Python loop.
        flags = ["-O3", "-ffp-contract=off"]
    return cythonize(
        [
            Extension(
                "layersteer._kernels",
                ["src/layersteer/_kernels.pyx"],
                extra_compile_args=flags,
            )
        ],
        language_level=3,
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
