"""Builds the native extension directly with setuptools.

CMake remains the primary build for the C++ library, CLI and tests; this
compiles the same sources so `pip install -e . --no-build-isolation` works
without any extra build backend.
"""

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

CORE_SOURCES = [
    "src/types.cpp",
    "src/digest.cpp",
    "src/extract.cpp",
    "src/baseline.cpp",
    "src/ingest.cpp",
    "src/judge_client.cpp",
    "src/prompts.cpp",
    "src/pipeline.cpp",
    "src/metrics.cpp",
    "src/metaeval.cpp",
]

ext = Pybind11Extension(
    "mathverify._core",
    sources=["src/python/bindings.cpp"] + CORE_SOURCES,
    include_dirs=["include", "vendor"],
    libraries=["crypto", "icuuc"],
    cxx_std=20,
)

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})
