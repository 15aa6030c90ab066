import sys

from oneshot_qcap.main import main

sys.exit(main())
