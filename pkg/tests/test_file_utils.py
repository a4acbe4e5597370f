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

__intname__ = "tests.csdetect.file_utils"
__author__ = "csdetect developers"
__copyright__ = "Copyright (C) 2024-2026 csdetect developers"
__licence__ = "BSD 3 Clause"
__build__ = "2026101701"

import json
import os

from csdetect.file_utils import *


def test_check_input_file():
    missing = "/nonexistent/path/fy.txt"
    try:
        check_input_file(missing)
    except FileNotFoundError as exc:
        assert missing in str(exc), "missing path should be named in the error"
    else:
        assert False, "Missing input should raise FileNotFoundError"


def test_check_output_dir(tmp_path):
    output_dir = os.path.join(str(tmp_path), "models", "nested")
    assert check_output_dir(output_dir) == output_dir
    assert os.path.isdir(output_dir), "output directory should be created"
    assert os.listdir(output_dir) == [], "write check file should be gone"


def test_atomic_write(tmp_path):
    path = os.path.join(str(tmp_path), "det.csv")
    write_lines(path, ["first"])
    try:
        with atomic_write(path) as file_handle:
            file_handle.write("partial")
            raise RuntimeError("interrupted")
    except RuntimeError:
        pass
    with open(path, "rb") as fp:
        assert fp.read() == b"first\n", "an interrupted write should keep the previous content"
    assert os.listdir(str(tmp_path)) == ["det.csv"], "temporary files should be cleaned up"


def test_lines_round_trip(tmp_path):
    path = os.path.join(str(tmp_path), "fy.txt")
    write_lines(path, ["ik wie", "hjir"])
    with open(path, "rb") as fp:
        assert fp.read() == b"ik wie\nhjir\n", "lines should end with a single newline"

    with open(path, "wb") as fp:
        fp.write(b"\xef\xbb\xbfik wie\r\nhjir\r\n")
    assert read_lines(path) == ["ik wie", "hjir"], "BOM and CRLF should be dropped"


def test_json_file(tmp_path):
    path = os.path.join(str(tmp_path), "summary.json")
    write_json_to_file(path, {"b": 1, "a": [0.5, "fy"]})
    with open(path, "r", encoding="utf-8") as fp:
        content = fp.read()
    assert content.index('"a"') < content.index('"b"'), "keys should be sorted"
    assert json.loads(content) == {"a": [0.5, "fy"], "b": 1}


if __name__ == "__main__":
    print("Example code for %s, %s" % (__intname__, __build__))
    import tempfile

    test_check_input_file()
    test_check_output_dir(tempfile.mkdtemp())
    test_atomic_write(tempfile.mkdtemp())
    test_lines_round_trip(tempfile.mkdtemp())
    test_json_file(tempfile.mkdtemp())
