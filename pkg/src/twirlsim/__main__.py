import sys

from twirlsim.cli import main

sys.exit(main())
