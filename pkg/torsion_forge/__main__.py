import sys

from torsion_forge.cli.main import main

sys.exit(main())
