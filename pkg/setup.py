"""Build script: compiles the GF(2) rank kernel if Cython + a C compiler
are available, otherwise installs the pure-Python fallback only."""

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    ext_modules = cythonize(
        [
            Extension(
                "toposon.kernels._gf2",
                sources=["src/toposon/kernels/_gf2.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # noqa: BLE001 - any build-chain gap means fallback
    print(f"cython extension skipped ({exc}); pure-python kernels will be used")

setup(ext_modules=ext_modules)
