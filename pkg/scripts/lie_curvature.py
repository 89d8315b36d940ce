#!/usr/bin/env python3

"""Curvature, SNC test and classification of low-dimensional metric Lie algebras.

Usage: lie_curvature.py [global options] {check,curvature,canonicalize,catalog,verify-paper} ...

Algebra documents are JSON files, e.g.

    {"schema": 1, "dim": 4, "brackets": [[1, 4, [-1, 0, 0, 0]], [2, 4, [0, -1, 0, 0]],
                                        [3, 4, [0, 0, -1, 0]]]}
"""

import logging
import sys

import katsdpservices

from curvlie.cli import main


if __name__ == "__main__":
    katsdpservices.setup_logging()
    logging.basicConfig(level=logging.INFO)
    sys.exit(main())
