from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

ext = Pybind11Extension(
    "hashpop._hashpop",
    sources=[
        "src/bindings.cpp",
        "src/types.cpp",
        "src/special_functions.cpp",
        "src/moments.cpp",
        "src/simulator.cpp",
        "src/fitting.cpp",
        "src/pipeline.cpp",
    ],
    include_dirs=["include", "vendor"],
    cxx_std=20,
)

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})
