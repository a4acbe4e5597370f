#! /usr/bin/env python
#  -*- coding: utf-8 -*-
#
# This file is part of csdetect package

"""
Bisection tools
bisect() takes a function and an ordered argument list, and finds the boundary argument
where the function result changes, eg the first prior weight on a sweep grid where a word
gets tagged with the first language

Versioning semantics:
    Major version: backward compatibility breaking changes
    Minor version: New functionality
    Patch version: Backwards compatible bug fixes

"""

__intname__ = "csdetect.bisection"
__author__ = "csdetect developers"
__copyright__ = "Copyright (C) 2024-2026 csdetect developers"
__description__ = "Bisection over ordered argument lists"
__licence__ = "BSD 3 Clause"
__version__ = "1.0.0"
__build__ = "2026101701"
__compat__ = "python3.7+"


from typing import Any, Callable, Sequence


def bisect(
    func: Callable,
    args_list: Sequence,
    expected_result: Any = True,
    allow_all_expected: bool = False,
) -> Any:
    """
    Finds the boundary argument in args_list that made func return expected_result

    func args can be a single argument, or a tuple of arguments
    Results must be ordered: expected results on one side, unexpected on the other
    [True, True, False, False] gives the last True argument (left to right ordering)
    [False, False, True, True] gives the first True argument (right to left ordering)

    allow_all_expected: if every argument gives the expected result, return the rightmost
                        argument instead of raising ValueError
    """
    args_list = list(args_list)
    if not args_list:
        raise ValueError("Cannot bisect an empty argument list")

    single_args = not isinstance(args_list[0], tuple)
    calls = [(arg,) for arg in args_list] if single_args else args_list

    def _result(index):
        return func(*calls[index]) == expected_result

    def _unwrap(index):
        return calls[index][0] if single_args else calls[index]

    index_left = 0
    index_right = len(calls) - 1
    left_ok = _result(index_left)
    right_ok = _result(index_right)

    if left_ok and right_ok:
        if not allow_all_expected:
            raise ValueError("Both sides of the argument list produced expected results")
        return _unwrap(index_right)
    if not left_ok and not right_ok:
        raise ValueError("Both sides of the argument list produced unexpected results")

    # Invariant: index_ok always gives expected result, index_ko never does
    if left_ok:
        index_ok, index_ko = index_left, index_right
    else:
        index_ok, index_ko = index_right, index_left

    while abs(index_ko - index_ok) > 1:
        index_middle = (index_ok + index_ko) // 2
        if _result(index_middle):
            index_ok = index_middle
        else:
            index_ko = index_middle
    return _unwrap(index_ok)
