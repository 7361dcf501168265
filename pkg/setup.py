from setuptools import setup

# The compiled LCS kernel is optional: if Cython or a C compiler is missing,
# the package falls back to the pure-Python kernel at import time.
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/tagcap/metrics/_kernels.pyx",
        language_level=3,
    )
except Exception:
    ext_modules = []

setup(ext_modules=ext_modules)
