from bss.cli import main

raise SystemExit(main())
