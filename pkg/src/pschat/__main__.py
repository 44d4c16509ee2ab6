import sys

from pschat.cli import main

sys.exit(main())
