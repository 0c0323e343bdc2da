#!/usr/bin/env python3
"""Coherent-state identity suite over an h sweep.

Thin wrapper over the coherent-check CLI pipeline; prints the same table.
"""

import sys

from scottlab.cli import main

if __name__ == "__main__":
    argv = ["coherent-check"] + (sys.argv[1:] or ["--h", "0.4,0.2,0.1"])
    sys.exit(main(argv))
