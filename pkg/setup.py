from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    # Build still succeeds without Cython; the numpy fallback is used at runtime.
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "rewbench.kernels._compiled",
                ["src/rewbench/kernels/_compiled.pyx"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
