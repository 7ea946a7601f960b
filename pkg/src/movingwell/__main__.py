"""Allow ``python -m movingwell``."""

import sys

from .cli import main

sys.exit(main())
