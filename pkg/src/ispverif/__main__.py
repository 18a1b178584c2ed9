import sys

from ispverif.cli import main

sys.exit(main())
