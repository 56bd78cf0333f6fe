import os

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install
    cythonize = None


def ext_modules():
    if cythonize is None or os.environ.get("QMINK_NO_EXT"):
        return []
    ext = Extension(
        "qmink._ckernels",
        sources=["src/qmink/_ckernels.pyx"],
        extra_compile_args=["-O3", "-fopenmp"],
        extra_link_args=["-fopenmp"],
        optional=True,
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=ext_modules())
