#! /usr/bin/env python
#  -*- coding: utf-8 -*-
#
# This file is part of csdetect package

"""
Logger initialization for csdetect command line runs
Records the worst called loglevel so a run can fail on logged errors

Versioning semantics:
    Major version: backward compatibility breaking changes
    Minor version: New functionality
    Patch version: Backwards compatible bug fixes

"""

__intname__ = "csdetect.logger_utils"
__author__ = "csdetect developers"
__copyright__ = "Copyright (C) 2024-2026 csdetect developers"
__description__ = "Shorthand for logger initialization, recording worst called loglevel"
__licence__ = "BSD 3 Clause"
__version__ = "1.0.0"
__build__ = "2026101701"
__compat__ = "python3.7+"

import logging
import os
import sys
import tempfile
from logging.handlers import RotatingFileHandler
from typing import Optional, Tuple

FORMATTER = "%(asctime)s :: %(levelname)s :: ##OPTIONAL_STRING##%(message)s"


class ContextFilterWorstLevel(logging.Filter):
    """
    Records the worst loglevel that was called by logger
    The cli uses it to turn logged errors into a non zero exit code
    """

    def __init__(self):
        super().__init__()
        self._worst_level = logging.NOTSET

    @property
    def worst_level(self) -> int:
        return self._worst_level

    @worst_level.setter
    def worst_level(self, value: int):
        if isinstance(value, int):
            self._worst_level = value
        else:
            raise ValueError("worst_level must be an integer")

    def filter(self, record: logging.LogRecord) -> bool:
        if record.levelno > self._worst_level:
            self._worst_level = record.levelno
        return True


def get_logger_formatter(formatter_insert: Optional[str] = None) -> logging.Formatter:
    if formatter_insert:
        return logging.Formatter(
            FORMATTER.replace("##OPTIONAL_STRING##", "{} :: ".format(formatter_insert))
        )
    return logging.Formatter(FORMATTER.replace("##OPTIONAL_STRING##", ""))


def logger_get_console_handler(
    formatter_insert: Optional[str] = None,
) -> Optional[logging.StreamHandler]:
    """
    Returns a console handler on stdout, falling back to stderr
    """
    formatter = get_logger_formatter(formatter_insert)
    for stream in (sys.stdout, sys.stderr):
        try:
            console_handler = logging.StreamHandler(stream)
        except OSError as exc:
            print("Cannot log to console stream. Message %s" % exc)
            continue
        console_handler.setFormatter(formatter)
        return console_handler
    return None


def logger_get_file_handler(
    log_file: str, formatter_insert: Optional[str] = None, max_bytes: int = 10485760
) -> Tuple[Optional[RotatingFileHandler], Optional[str]]:
    """
    Returns a log file handler
    On failure, will return a temporary file log handler and the reason we could not use log_file
    """
    formatter = get_logger_formatter(formatter_insert)
    err_output = None
    try:
        file_handler = RotatingFileHandler(
            log_file, mode="a", encoding="utf-8", maxBytes=max_bytes, backupCount=3
        )
    except OSError as exc:
        err_output = str(exc)
        temp_log_file = os.path.join(tempfile.gettempdir(), __intname__ + ".log")
        try:
            file_handler = RotatingFileHandler(
                temp_log_file,
                mode="a",
                encoding="utf-8",
                maxBytes=max_bytes,
                backupCount=1,
            )
        except OSError as exc:
            return None, "Cannot create temporary log file either: %s" % exc
        err_output += "\nUsing [%s]" % temp_log_file
    file_handler.setFormatter(formatter)
    return file_handler, err_output


def logger_get_logger(
    log_file: Optional[str] = None,
    console: bool = True,
    debug: bool = False,
    formatter_insert: Optional[str] = None,
    max_bytes: int = 10485760,
) -> logging.Logger:
    """
    Returns the root logger configured for console and/or file
    The returned logger gets get_worst_logger_level() / set_worst_logger_level() methods
    """
    # Root logger so every csdetect.* module logger propagates here
    _logger = logging.getLogger()

    while _logger.handlers:
        _logger.handlers.pop()
    for flt in list(_logger.filters):
        if isinstance(flt, ContextFilterWorstLevel):
            _logger.removeFilter(flt)

    _logger.setLevel(logging.DEBUG if debug else logging.INFO)

    if console:
        console_handler = logger_get_console_handler(formatter_insert=formatter_insert)
        if console_handler:
            _logger.addHandler(console_handler)
    err_output = None
    if log_file:
        file_handler, err_output = logger_get_file_handler(
            log_file, formatter_insert=formatter_insert, max_bytes=max_bytes
        )
        if file_handler:
            _logger.addHandler(file_handler)

    # Record levels on handlers so records from child loggers are seen too
    worst_level_filter = ContextFilterWorstLevel()
    _logger.addFilter(worst_level_filter)
    for handler in _logger.handlers:
        handler.addFilter(worst_level_filter)

    if err_output is not None:
        _logger.warning('Failed to use log file "%s", %s.', log_file, err_output)

    # pylint: disable=E1120 (no-value-for-parameter)
    _logger.get_worst_logger_level = get_worst_logger_level.__get__(
        _logger, type(_logger)
    )
    _logger.set_worst_logger_level = set_worst_logger_level.__get__(
        _logger, type(_logger)
    )
    return _logger


def _find_worst_level_filter(logger_instance: logging.Logger):
    for flt in logger_instance.filters:
        if isinstance(flt, ContextFilterWorstLevel):
            return flt
    return None


def get_worst_logger_level(self, logger_instance: Optional[logging.Logger] = None) -> int:
    """
    Return the worst log level called since logger creation or last reset
    """
    flt = _find_worst_level_filter(logger_instance or self)
    return flt.worst_level if flt else 0


def set_worst_logger_level(
    self, value: int = 0, logger_instance: Optional[logging.Logger] = None
) -> None:
    """
    Reset (or force) the recorded worst log level
    """
    flt = _find_worst_level_filter(logger_instance or self)
    if flt:
        flt.worst_level = value
