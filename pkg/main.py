#!/usr/bin/env python3
"""Main entry point for the Mathieu function and strip-plane Casimir tool."""

import sys

from src.cli.app import run


def main() -> None:
    """Main function to run one command-line invocation."""
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
