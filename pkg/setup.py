from setuptools import Extension, setup
from Cython.Build import cythonize

extensions = [
    Extension("wgfem._sweeps", ["src/wgfem/_sweeps.pyx"]),
]

setup(
    ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}),
)
