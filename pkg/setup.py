"""Build script: compiles the solver core to a C extension when Cython is available.

The extension shadows src/ctforge/_satcore.py at import time; without a compiler
or Cython the same file runs uncompiled as the fallback backend.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("ctforge._satcore", ["src/ctforge/_satcore.py"])],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "initializedcheck": False,
            "nonecheck": False,
        },
    )
    # identical float results compiled vs. interpreted: no fused multiply-add
    for ext in ext_modules:
        ext.extra_compile_args = ["-ffp-contract=off", "-O2"]
except ImportError:
    pass

setup(ext_modules=ext_modules)
