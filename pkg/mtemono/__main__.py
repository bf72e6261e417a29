import sys

from mtemono.cli import main

sys.exit(main())
