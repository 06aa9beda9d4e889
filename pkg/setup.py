import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "mvksolve._core._els",
                ["src/mvksolve/_core/_els.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    # Without Cython the package still works through the numpy fallback
    # in mvksolve._core._ref.
    extensions = []

setup(ext_modules=extensions)
