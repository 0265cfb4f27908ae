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
        source_dir = Path(__file__).parent.resolve()
        build_dir = Path(self.build_temp).resolve()
        build_dir.mkdir(parents=True, exist_ok=True)
        out_dir = Path(self.get_ext_fullpath(ext.name)).parent.resolve()
        out_dir.mkdir(parents=True, exist_ok=True)

        cfg = [
            "cmake",
            "-S", str(source_dir),
            "-B", str(build_dir),
            "-DSKBUILD=ON",
            "-DEVPCA_BUILD_PYTHON=ON",
            f"-DPython3_EXECUTABLE={sys.executable}",
            "-DCMAKE_BUILD_TYPE=Release",
        ]
        subprocess.run(cfg, check=True)
        subprocess.run(
            ["cmake", "--build", str(build_dir), "--target", "_evpca"],
            check=True,
        )

        built = sorted(build_dir.glob("evpca*.so")) or sorted(
            build_dir.glob("evpca*.pyd")
        )
        if not built:
            raise RuntimeError("CMake did not produce the evpca module")
        target = Path(self.get_ext_fullpath(ext.name))
        shutil.copy2(built[0], target)


setup(
    ext_modules=[CMakeExtension("evpca")],
    cmdclass={"build_ext": CMakeBuild},
)
