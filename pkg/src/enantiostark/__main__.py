import sys

from enantiostark._cli import main

sys.exit(main())
