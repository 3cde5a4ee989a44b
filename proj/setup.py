import os
import shutil
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        source_dir = Path(__file__).resolve().parent
        build_dir = Path(self.build_temp).resolve()
        build_dir.mkdir(parents=True, exist_ok=True)

        subprocess.run(
            [
                "cmake",
                "-S", str(source_dir),
                "-B", str(build_dir),
                "-DCMAKE_BUILD_TYPE=Release",
                f"-DPython3_EXECUTABLE={sys.executable}",
            ],
            check=True,
        )
        subprocess.run(
            [
                "cmake", "--build", str(build_dir),
                "--target", "epicon_pymod", "epicon",
                f"-j{os.cpu_count() or 1}",
            ],
            check=True,
        )

        module_dest = Path(self.get_ext_fullpath(ext.name)).resolve()
        module_dest.parent.mkdir(parents=True, exist_ok=True)
        built = sorted((build_dir / "python" / "epicon").glob("_core*.so"))
        if not built:
            raise RuntimeError("cmake build did not produce the _core extension")
        shutil.copy2(built[0], module_dest)

        bin_dir = module_dest.parent / "bin"
        bin_dir.mkdir(parents=True, exist_ok=True)
        shutil.copy2(build_dir / "epicon", bin_dir / "epicon")


setup(
    ext_modules=[CMakeExtension("epicon._core")],
    cmdclass={"build_ext": CMakeBuild},
)
