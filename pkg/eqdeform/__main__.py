import sys

from eqdeform.app import main

sys.exit(main())
