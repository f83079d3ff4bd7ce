import sys

from delaycal.cli import main

sys.exit(main())
