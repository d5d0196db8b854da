import sys

from pairlotto.cli import main

sys.exit(main())
