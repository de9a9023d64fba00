import sys
from pysgdct.cli import main

sys.exit(main())
