"""Build the optional compiled kernels.

Without Cython or a C compiler the package still installs; ``zerolaw.kernels``
then falls back to the pure-Python implementations.
"""
from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension
except ImportError:  # pragma: no cover
    pass
else:
    ext_modules = cythonize(
        [
            Extension(
                "zerolaw._ckernels",
                ["src/zerolaw/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
