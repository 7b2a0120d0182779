import sys

from relaxrk.cli import main

sys.exit(main())
