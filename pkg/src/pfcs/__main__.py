import sys

from pfcs.cli import main

sys.exit(main())
