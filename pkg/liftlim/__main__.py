"""Run liftlim as ``python -m liftlim``."""

import sys

from liftlim.cli import main

if __name__ == "__main__":
    sys.exit(main())
