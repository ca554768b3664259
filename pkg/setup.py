import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Build the accelerator if possible; fall back to pure Python otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            print(f"warning: skipping compiled kernel ({exc})", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: skipping {ext.name} ({exc})", file=sys.stderr)


try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [Extension("pwss._speedups", ["src/pwss/_speedups.pyx"])],
        language_level="3",
    )
except Exception as exc:
    print(f"warning: Cython unavailable, pure-Python kernel only ({exc})", file=sys.stderr)
    extensions = []

setup(ext_modules=extensions, cmdclass={"build_ext": optional_build_ext})
