"""Build script: compiles the optional Monte Carlo path kernel.

The extension links against numpy's npyrandom static library so the kernel
can draw from the same Philox streams as the pure-numpy engine. If the
toolchain is unavailable the build degrades to a pure-Python install; the
package selects the numpy engine at import time.
"""

import os

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the speedup extension if possible, otherwise warn and continue."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - toolchain dependent
            print(f"warning: skipping compiled kernel ({exc}); "
                  "qvpricer will use the pure-numpy Monte Carlo engine")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover - toolchain dependent
            print(f"warning: could not compile {ext.name} ({exc}); "
                  "qvpricer will use the pure-numpy Monte Carlo engine")


def extensions():
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:  # pragma: no cover - build environment dependent
        return []
    npyrandom = os.path.join(os.path.dirname(np.random.__file__), "lib")
    ext = Extension(
        "qvpricer.montecarlo._speedup",
        ["src/qvpricer/montecarlo/_speedup.pyx"],
        include_dirs=[np.get_include()],
        library_dirs=[npyrandom],
        libraries=["npyrandom"],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], language_level="3")


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
