import sys

from xrcache import main

if __name__ == "__main__":
    sys.exit(main())
