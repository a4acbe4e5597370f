#! /usr/bin/env python
#  -*- coding: utf-8 -*-
#
# This file is part of csdetect package


__intname__ = "csdetect.setup"
__author__ = "csdetect developers"
__copyright__ = "Copyright (C) 2024-2026 csdetect developers"
__licence__ = "BSD 3 Clause"
__build__ = "2026101701"

"""
Single distribution packaging

Every csdetect subpackage keeps its own requirements.txt, the distribution installs their union
"""

import glob
import os

import pkg_resources
import setuptools


def _read_file(filename):
    here = os.path.abspath(os.path.dirname(__file__))
    with open(os.path.join(here, filename), "r", encoding="utf-8") as file_handle:
        return file_handle.read()


def get_metadata(package_file):
    """
    Read metadata from package file
    """

    _metadata = {}

    for line in _read_file(package_file).splitlines():
        if line.startswith("__version__") or line.startswith("__description__"):
            delim = "="
            _metadata[line.split(delim)[0].strip().strip("__")] = (
                line.split(delim)[1].strip().strip("'\"")
            )
    return _metadata


def parse_requirements(filename):
    """
    There is a parse_requirements function in pip but it keeps changing import path
    Let's build a simple one
    """
    try:
        requirements_txt = _read_file(filename)
        install_requires = [
            str(requirement)
            for requirement in pkg_resources.parse_requirements(requirements_txt)
        ]
        return install_requires
    except OSError:
        print(
            'WARNING: No requirements.txt file found as "{}". Please check path or create an empty one'.format(
                filename
            )
        )
        return []


def collect_requirements(package_name):
    """
    Union of the package and subpackage requirements, first seen order kept
    """
    requirements = []
    files = [os.path.join(package_name, "requirements.txt")]
    files += sorted(glob.glob(os.path.join(package_name, "*", "requirements.txt")))
    for filename in files:
        for requirement in parse_requirements(filename):
            if requirement not in requirements:
                requirements.append(requirement)
    return requirements


#  ######### ACTUAL SCRIPT ENTRY POINT

PACKAGE_NAME = "csdetect"
package_path = os.path.abspath(PACKAGE_NAME)
package_file = os.path.join(package_path, "__init__.py")
metadata = get_metadata(package_file)
requirements = collect_requirements(PACKAGE_NAME)
long_description = _read_file("README.md")

setuptools.setup(
    name=PACKAGE_NAME,
    packages=setuptools.find_packages(include=[PACKAGE_NAME, PACKAGE_NAME + ".*"]),
    package_data={"": ["requirements.txt"]},
    version=metadata["version"],
    install_requires=requirements,
    extras_require={"tests": ["pytest", "hypothesis"]},
    entry_points={"console_scripts": ["csdetect = csdetect.cli:main"]},
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering",
        "Topic :: Text Processing :: Linguistic",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: Implementation :: CPython",
        "Operating System :: OS Independent",
        "License :: OSI Approved :: BSD License",
    ],
    description=metadata["description"],
    author="csdetect developers",
    keywords=["code-switching", "language identification", "n-gram", "kneser-ney", "DET", "EER"],
    long_description=long_description,
    long_description_content_type="text/markdown",
    python_requires=">=3.7",
    zip_safe=False,
)
