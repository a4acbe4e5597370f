#! /usr/bin/env python
#  -*- coding: utf-8 -*-
#
# This file is part of csdetect package

"""
File handling for csdetect outputs
Every artifact is written to a temporary file in the target directory, then renamed,
so readers never see half written reports

Versioning semantics:
    Major version: backward compatibility breaking changes
    Minor version: New functionality
    Patch version: Backwards compatible bug fixes

"""

__intname__ = "csdetect.file_utils"
__author__ = "csdetect developers"
__copyright__ = "Copyright (C) 2024-2026 csdetect developers"
__description__ = "Atomic file writes, JSON output and path handling"
__licence__ = "BSD 3 Clause"
__version__ = "1.0.0"
__build__ = "2026101701"
__compat__ = "python3.7+"

import json
import logging
import os
import tempfile
from contextlib import contextmanager
from threading import Lock
from typing import Iterator, List, TextIO, Union

logger = logging.getLogger(__intname__)
FILE_LOCK = Lock()


@contextmanager
def _file_lock():
    """
    Serializes directory creation and renames between threaded sweep workers
    """
    FILE_LOCK.acquire()
    try:
        yield
    finally:
        FILE_LOCK.release()


def make_path(path: str) -> None:
    with _file_lock():
        if path and not os.path.isdir(path):
            os.makedirs(path)


def check_input_file(path: str) -> str:
    """
    Raises FileNotFoundError with the offending path when an input file is missing
    """
    if not path or not os.path.isfile(path):
        raise FileNotFoundError('Input file "{}" does not exist.'.format(path))
    return path


def check_output_dir(path: str) -> str:
    """
    Creates the output directory if needed and checks we can write there
    """
    make_path(path)
    try:
        with tempfile.NamedTemporaryFile(dir=path, prefix=".csdetect-write-check-"):
            pass
    except OSError as exc:
        raise OSError('Output directory "{}" is not writable: {}'.format(path, exc))
    return path


@contextmanager
def atomic_write(path: str, encoding: str = "utf-8") -> Iterator[TextIO]:
    """
    Write to a temporary sibling of path, then rename over path

    with atomic_write("det.csv") as file_handle:
        file_handle.write(...)
    """
    directory = os.path.dirname(os.path.abspath(path))
    make_path(directory)
    file_descriptor, temp_path = tempfile.mkstemp(
        dir=directory, prefix="." + os.path.basename(path) + ".", suffix=".tmp"
    )
    try:
        # newline="" keeps "\n" line endings on every platform so digests are stable
        with os.fdopen(file_descriptor, "w", encoding=encoding, newline="") as file_handle:
            yield file_handle
        with _file_lock():
            os.replace(temp_path, path)
    except BaseException:
        if os.path.isfile(temp_path):
            os.remove(temp_path)
        raise
    logger.debug('Wrote "%s"', path)


def write_lines(path: str, lines: List[str]) -> None:
    with atomic_write(path) as file_handle:
        for line in lines:
            file_handle.write(line)
            file_handle.write("\n")


def read_lines(path: str) -> List[str]:
    """
    Reads a UTF-8 text file, dropping a possible BOM and trailing newlines
    """
    check_input_file(path)
    with open(path, "r", encoding="utf-8-sig") as file_handle:
        return [line.rstrip("\r\n") for line in file_handle]


def write_json_to_file(path: str, data: Union[dict, list]) -> None:
    """
    Writes JSON with sorted keys and a fixed indent so identical data gives identical bytes
    """
    with atomic_write(path) as file_handle:
        json.dump(data, file_handle, ensure_ascii=False, indent=2, sort_keys=True)
        file_handle.write("\n")
