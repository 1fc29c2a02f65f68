import sys

from reduction.cli import main

sys.exit(main())
