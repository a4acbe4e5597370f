#! /usr/bin/env python
#  -*- coding: utf-8 -*-
#
# This file is part of csdetect package

"""
Delimited report files (det.csv, wer.tsv, switches.tsv...) reader and writer

Versioning semantics:
    Major version: backward compatibility breaking changes
    Minor version: New functionality
    Patch version: Backwards compatible bug fixes

"""

__intname__ = "csdetect.csv"
__author__ = "csdetect developers"
__copyright__ = "Copyright (C) 2024-2026 csdetect developers"
__description__ = "CSV / TSV report reader and atomic writer with header management and comment skipping"
__licence__ = "BSD 3 Clause"
__version__ = "1.0.0"
__build__ = "2026101701"
__compat__ = "python3.7+"


import csv
from typing import Dict, Iterable, Iterator, List, Optional

from csdetect.file_utils import atomic_write, check_input_file


def csv_dict_reader(
    file: str, skip_comment_char: Optional[str] = None, encoding: str = "utf-8", **kwargs
) -> Iterator[Dict[str, str]]:
    """
    Reads CSV file and provides a generator for every line and skips commented out lines

    :param file: (str) path to csv file to read
    :param skip_comment_char: (str) optional character which, if found on first row, will skip row
    :param delimiter: (char) CSV delimiter char
    :param fieldnames: (list) CSV field names for dictionary creation, implies that no header is present in file
                              If not given, first line is used as header and skipped from results
    """
    delimiter = kwargs.pop("delimiter", ",")
    fieldnames = kwargs.pop("fieldnames", None)

    check_input_file(file)
    with open(file, encoding=encoding, newline="") as fp:
        csv_data = csv.DictReader(fp, delimiter=delimiter, fieldnames=fieldnames)
        for row in csv_data:
            if skip_comment_char:
                first_value = row[csv_data.fieldnames[0]] or ""
                if first_value.startswith(skip_comment_char):
                    continue
            yield row


def csv_dict_writer(
    file: str, rows: Iterable[Dict[str, object]], fieldnames: List[str], **kwargs
) -> None:
    """
    Writes rows (dicts) with a header line, atomically
    Floats should be formatted by the caller, so the file content does not depend on repr()

    :param delimiter: (char) CSV delimiter char, "," by default, use "\\t" for TSV
    """
    delimiter = kwargs.pop("delimiter", ",")
    with atomic_write(file) as fp:
        writer = csv.DictWriter(
            fp, fieldnames=fieldnames, delimiter=delimiter, lineterminator="\n"
        )
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
