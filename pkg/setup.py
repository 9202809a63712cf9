import os

import numpy as np
from setuptools import setup

ext_modules = []
if os.environ.get("PHANTOMRTS_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:  # pure-Python fallback is used at import time
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "phantomrts._core",
                    ["src/phantomrts/_core.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
