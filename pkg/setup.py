from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [Extension("eatcert._kernels", ["src/eatcert/_kernels.pyx"])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # Pure-Python fallback is selected at import time when the compiled
    # kernels are unavailable.
    extensions = []

setup(ext_modules=extensions)
