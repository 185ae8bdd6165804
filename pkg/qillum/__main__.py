from qillum.cli.main import main

raise SystemExit(main())
