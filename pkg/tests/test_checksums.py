#! /usr/bin/env python
#  -*- coding: utf-8 -*-
#
# This file is part of csdetect package

"""
Versioning semantics:
    Major version: backward compatibility breaking changes
    Minor version: New functionality
    Patch version: Backwards compatible bug fixes
"""

__intname__ = "tests.csdetect.checksums"
__author__ = "csdetect developers"
__copyright__ = "Copyright (C) 2024-2026 csdetect developers"
__licence__ = "BSD 3 Clause"
__build__ = "2026101701"

import os

from csdetect.checksums import *
from csdetect.file_utils import write_lines

HAXX0R_SUM = "4c77f1bd193cac476cea5af2225e8c0177d5a009390aa6e119c211a00cf325c9"


def create_test_file(directory):
    path = os.path.join(str(directory), "checksum_file.bin")
    with open(path, "wb") as fp:
        fp.write(b"haxx0r3000")
    return path


def test_sha256sum(tmp_path):
    test_file = create_test_file(tmp_path)
    assert sha256sum(test_file) == HAXX0R_SUM, "Bogus checksum"
    assert sha256sum_data(b"haxx0r3000") == HAXX0R_SUM, "Bogus data checksum"


def test_digest_files(tmp_path):
    sub_directory = os.path.join(str(tmp_path), "models")
    os.makedirs(sub_directory)
    second = os.path.join(sub_directory, "lm_fy.arpa")
    write_lines(second, ["\\data\\"])
    first = create_test_file(tmp_path)

    digests = digest_files([second, first], root=str(tmp_path))
    assert list(digests) == ["checksum_file.bin", "models/lm_fy.arpa"], "digests should be sorted with / separators"
    assert digests["checksum_file.bin"] == HAXX0R_SUM


if __name__ == "__main__":
    print("Example code for %s, %s" % (__intname__, __build__))
    import tempfile

    test_sha256sum(tempfile.mkdtemp())
    test_digest_files(tempfile.mkdtemp())
