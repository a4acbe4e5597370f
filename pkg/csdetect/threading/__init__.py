#! /usr/bin/env python
#  -*- coding: utf-8 -*-
#
# This file is part of csdetect package

"""
Function decorator running a function as a thread and handing back a Future
Used to evaluate independent sweep points concurrently
Use with @threaded

Versioning semantics:
    Major version: backward compatibility breaking changes
    Minor version: New functionality
    Patch version: Backwards compatible bug fixes

"""

__intname__ = "csdetect.threading"
__author__ = "csdetect developers"
__copyright__ = "Copyright (C) 2024-2026 csdetect developers"
__description__ = "Threading decorator to run functions as threads returning futures"
__licence__ = "BSD 3 Clause"
__version__ = "1.0.0"
__build__ = "2026101701"
__compat__ = "python3.7+"


import threading
from concurrent.futures import Future, wait
from functools import wraps
from typing import Any, List, Optional, Union


def call_with_future(fn, future: Future, args, kwargs) -> None:
    """
    Runs fn and stores its result or exception into future
    """
    try:
        result = fn(*args, **kwargs)
        future.set_result(result)
    except Exception as exc:  # noqa
        future.set_exception(exc)


def threaded(fn):
    """
    @threaded wrapper in order to thread any function

    @threaded
    def somefunc(arg):
        return 'arg was %s' % arg

    future = somefunc('foo')
    print(future.result())

    Passing __no_threads=True runs the function inline and returns its plain result
    """

    @wraps(fn)
    def wrapper(*args, **kwargs):
        if kwargs.pop("__no_threads", False):
            return fn(*args, **kwargs)
        future = Future()
        thread = threading.Thread(
            target=call_with_future, args=(fn, future, args, kwargs)
        )
        thread.daemon = True
        thread.start()
        return future

    return wrapper


def wait_for_threaded_result(
    threads: Union[List[Any], Any], timeout: Optional[float] = None
) -> Any:
    """
    Waits for a future or a list of futures and returns result or result list, in given order
    Non future values (from __no_threads calls) are handed back as is

    if timeout is reached, unfinished futures give None
    Exceptions raised in threads are re-raised here
    """
    source_is_list = isinstance(threads, list)
    if not source_is_list:
        threads = [threads]

    futures = [thread for thread in threads if isinstance(thread, Future)]
    if futures:
        wait(futures, timeout=timeout)

    result_list = []
    for thread in threads:
        if isinstance(thread, Future):
            result_list.append(thread.result() if thread.done() else None)
        else:
            result_list.append(thread)
    if not source_is_list:
        return result_list[0]
    return result_list
