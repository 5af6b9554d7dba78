"""Build the optional compiled scoring kernel.

The package works without it: i3rab.parser falls back to the pure numpy
backend when the extension is missing (see i3rab._scoring_py).
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "i3rab._scoring",
                ["src/i3rab/_scoring.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
