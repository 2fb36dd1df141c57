from __future__ import annotations

from superloc.app import main

if __name__ == "__main__":
    raise SystemExit(main())
