import sys

from foldkit.main import main

sys.exit(main())
