"""Build script: compiles the optional bicubic interpolation kernel.

The package works without the extension (a NumPy fallback is selected at
import time), so the build is allowed to proceed when Cython or a C
compiler is unavailable.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "bouslp._bicubic",
                ["src/bouslp/_bicubic.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
