#!/usr/bin/env python3
from setuptools import setup

import ibx.const as ibx_const

NAME = "ibx"
DESCRIPTION = "Reward-function explanations through information bottleneck abstractions"
URL = "https://github.com/ibx-dev/{}".format(NAME)
AUTHOR = "ibx developers"


PROJECT_URLS = {
    "Bug Reports": "{}/issues".format(URL),
    "Source": "{}/tree/master".format(URL),
}


MIN_PY_VERSION = ".".join(map(str, ibx_const.REQUIRED_PYTHON_VER))

with open("README.md", "r", encoding="utf-8") as f:
    README = f.read()


REQUIRES = [
    "matplotlib>=3.3",
    "numpy>=1.20",
    "orjson>=3.7.2",
    "scipy>=1.6",
]


setup(
    name=NAME,
    version=ibx_const.__version__,
    description=DESCRIPTION,
    long_description=README,
    long_description_content_type="text/markdown",
    url=URL,
    packages=["ibx"],
    package_data={"ibx": ["resources/*.json"]},
    include_package_data=True,
    project_urls=PROJECT_URLS,
    python_requires=">={}".format(MIN_PY_VERSION),
    install_requires=REQUIRES,
    license="Apache License 2.0",
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: Apache Software License",
        "Natural Language :: English",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Topic :: Scientific/Engineering :: Artificial Intelligence",
        "Topic :: Scientific/Engineering :: Information Analysis",
    ],
    extras_require={
        "PNG": ["pypng"],
    },
    entry_points={
        "console_scripts": ["ibx=ibx.cli:main"],
    },
)
