"""Build script for the optional compiled kernels.

The extension is optional: if Cython or a C compiler is unavailable the
package installs without it and falls back to the numpy kernels.
"""

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "halfmass._ckernels",
                ["src/halfmass/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                # no FMA contraction: must round like the numpy path
                extra_compile_args=["-O3", "-ffp-contract=off"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
