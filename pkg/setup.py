import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    # pure-python fallback in blockspec._kernels_py is picked up at import
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "blockspec._kernels",
                ["src/blockspec/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
