import os

from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize
except ImportError:  # build without the compiled core; pure-Python kernels are used
    ext_modules = []
else:
    extensions = [
        Extension(
            "patternlab._kernels",
            ["src/patternlab/_kernels.pyx"],
            include_dirs=[np.get_include()],
            extra_compile_args=["-O3"],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        )
    ]
    ext_modules = [] if os.environ.get("PATTERNLAB_NO_EXT") else cythonize(
        extensions, compiler_directives={"language_level": "3"}
    )

setup(ext_modules=ext_modules)
