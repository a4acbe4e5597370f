#! /usr/bin/env python
#  -*- coding: utf-8 -*-
#
# This file is part of csdetect package

import sys

from csdetect.cli import main

if __name__ == "__main__":
    sys.exit(main())
