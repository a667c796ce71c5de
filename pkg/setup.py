import os
import sys

from setuptools import setup, Extension


def maybe_cython_extensions():
    # The compiled kernels are an optional speedup; the package runs on the
    # pure-Python twins if the build is unavailable.
    if os.environ.get("PDCMI_SKIP_EXTENSIONS"):
        return []
    try:
        from Cython.Build import cythonize
        import numpy as np
    except ImportError:
        return []
    ext = Extension(
        "pdcmi._kernels",
        ["src/pdcmi/_kernels.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], language_level=3)


try:
    setup(ext_modules=maybe_cython_extensions())
except SystemExit:
    if os.environ.get("PDCMI_SKIP_EXTENSIONS"):
        raise
    # Retry without the extension so a broken toolchain cannot block install.
    print("extension build failed; installing pure-Python fallback",
          file=sys.stderr)
    os.environ["PDCMI_SKIP_EXTENSIONS"] = "1"
    setup(ext_modules=[])
