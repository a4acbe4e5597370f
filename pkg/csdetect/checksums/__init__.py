#! /usr/bin/env python
#  -*- coding: utf-8 -*-
#
# This file is part of csdetect package

"""
SHA256 digests of run inputs, outputs and configurations
Used to build the manifest.json every csdetect subcommand writes

Versioning semantics:
    Major version: backward compatibility breaking changes
    Minor version: New functionality
    Patch version: Backwards compatible bug fixes

"""

__intname__ = "csdetect.checksums"
__author__ = "csdetect developers"
__copyright__ = "Copyright (C) 2024-2026 csdetect developers"
__description__ = "SHA256 checksumming for run manifests"
__licence__ = "BSD 3 Clause"
__version__ = "1.0.0"
__build__ = "2026101701"
__compat__ = "python3.7+"


import hashlib
import os
from typing import Dict, Iterable, Optional


def sha256sum_data(data: bytes) -> str:
    """
    Returns sha256sum of some data
    """
    sha256 = hashlib.sha256()
    sha256.update(data)
    return sha256.hexdigest()


def sha256sum(file: str) -> str:
    """
    Returns the sha256 sum of a file, read in 64KB chunks
    """
    sha256 = hashlib.sha256()
    try:
        with open(file, "rb") as file_handle:
            while True:
                data = file_handle.read(65536)
                if not data:
                    break
                sha256.update(data)
        return sha256.hexdigest()
    except OSError as exc:
        raise OSError('Cannot create SHA256 sum for file "%s": %s' % (file, exc))


def digest_files(files: Iterable[str], root: Optional[str] = None) -> Dict[str, str]:
    """
    Returns {path: sha256} for given files
    Paths are made relative to root when given, and always use "/" so manifests compare across platforms
    """
    digests = {}
    for file in files:
        name = os.path.relpath(file, root) if root else file
        digests[name.replace(os.sep, "/")] = sha256sum(file)
    return dict(sorted(digests.items()))
