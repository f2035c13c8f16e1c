"""gwdamage - main entry point."""
import sys

from src.cli.app import main

if __name__ == "__main__":
    sys.exit(main())
