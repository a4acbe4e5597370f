#! /usr/bin/env python
#  -*- coding: utf-8 -*-
#
# This file is part of csdetect package

"""
csdetect is a code-switching detection evaluation toolkit:
language model prior sweeps for word level language tagging, a time based detection metric
with DET / EER reporting, tagged and untagged WER, switch / segment / confusion analyses
and n-gram based code-switched text generation

Versioning semantics:
    Major version: backward compatibility breaking changes
    Minor version: New functionality
    Patch version: Backwards compatible bug fixes

"""

__intname__ = "csdetect"
__author__ = "csdetect developers"
__copyright__ = "Copyright (C) 2024-2026 csdetect developers"
__description__ = "Code-switching detection and bilingual language model evaluation toolkit"
__licence__ = "BSD 3 Clause"
__version__ = "1.0.0"
__build__ = "2026101701"
