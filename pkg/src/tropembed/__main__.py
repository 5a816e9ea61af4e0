import sys

from tropembed.cli import main

sys.exit(main())
