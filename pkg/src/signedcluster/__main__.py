import sys

from signedcluster.cli import main

sys.exit(main())
