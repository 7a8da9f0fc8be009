from setuptools import Extension, setup

setup(
    ext_modules=[
        Extension(
            "tvpdhors._kernel",
            sources=[
                "src/tvpdhors/_kernel.cpp",
                "third_party/cityhash/city.cc",
            ],
            include_dirs=["third_party/xxhash", "third_party/cityhash"],
            extra_compile_args=["-O3", "-msse4.2"],
        )
    ]
)
