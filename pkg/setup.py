import os

import numpy as np
from setuptools import Extension, setup

try:
    import gmpy2
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; dgendo falls back at import
    ext_modules = []
else:
    gmpy2_dir = os.path.dirname(gmpy2.__file__)
    ext_modules = cythonize(
        [
            Extension(
                "dgendo._kernels",
                ["src/dgendo/_kernels.pyx"],
                include_dirs=[np.get_include(), gmpy2_dir],
                libraries=["gmp"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        include_path=[os.path.dirname(gmpy2_dir)],
        compiler_directives={"language_level": 3},
    )

setup(ext_modules=ext_modules)
