import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    # -ffp-contract=off keeps the extension bit-compatible with the pure
    # numpy fallback (no FMA contraction inside the SMO/sanitize loops).
    extensions = cythonize(
        [
            Extension(
                "ppdr._core",
                ["src/ppdr/_core.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3", "-ffp-contract=off"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
else:
    extensions = []

setup(ext_modules=extensions)
