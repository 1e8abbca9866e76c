"""Build script: compiles the Cython scan kernels when a toolchain is available.

The compiled extension is optional.  If Cython or a C compiler is missing the
package installs anyway and falls back to the pure-Python kernels at import
time (see ssnscan._kernels).
"""

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Swallow extension build failures so the pure-Python path still installs."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            print(f"warning: building ssnscan C extension failed ({exc}); "
                  "falling back to pure-Python kernels")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: building {ext.name} failed ({exc}); "
                  "falling back to pure-Python kernels")


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        print("warning: Cython not available; installing pure-Python kernels only")
        return []
    ext = Extension(
        "ssnscan._kernels._scan_cy",
        sources=["src/ssnscan/_kernels/_scan_cy.pyx"],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(
    ext_modules=extensions(),
    cmdclass={"build_ext": OptionalBuildExt},
)
