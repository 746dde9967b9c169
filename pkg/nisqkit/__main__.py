"""Entry point for ``python -m nisqkit``."""
import sys

from nisqkit.cli import main

sys.exit(main())
