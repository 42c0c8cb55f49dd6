import sys

from legal_deid.cli import main

sys.exit(main())
