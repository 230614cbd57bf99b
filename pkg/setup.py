import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Build the fast quorum-scan extension if possible, else fall back.

    The package is fully functional without the extension; regsim.kernels
    selects the pure-Python implementation when the import fails.
    """

    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing compiler, broken toolchain
            warnings.warn("skipping C extension build (%s); using pure Python kernels" % exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn("failed to build %s (%s); using pure Python kernels" % (ext.name, exc))


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    return cythonize(
        [Extension("regsim._maskops_c", ["src/regsim/_maskops_c.pyx"])],
        language_level=3,
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
