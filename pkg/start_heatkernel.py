#!/usr/bin/env python3
"""
Heat Kernel Toolkit Launcher

Checks that the numerical stack is installed, then hands the arguments to
the command line front end.

Usage:
    python start_heatkernel.py <command> [options]

Commands:
    kernel        Evaluate the lattice heat kernel at one site
    expansion     Compare a truncated large-time expansion with the kernel
    omega         Tabulate Omega and its far-field form
    constants     Print the constant S0 and its parts
    verify        Run the bound dashboard

Examples:
    python start_heatkernel.py kernel --s1 0 --s2 0 --t 0
    python start_heatkernel.py constants --format json
    python start_heatkernel.py verify --suite all
"""

import sys

REQUIRED = ("numpy", "scipy", "colorama", "dotenv", "rich")


def check_dependencies():
    """Check if all required dependencies are installed."""
    missing = []
    for name in REQUIRED:
        try:
            __import__(name)
        except ImportError:
            missing.append(name)
    if missing:
        print(f"Missing dependency: {', '.join(missing)}", file=sys.stderr)
        print("Please install required dependencies with: pip3 install -r requirements.txt", file=sys.stderr)
        return False
    return True


def main(argv=None):
    """Main entry point for the toolkit."""
    if not check_dependencies():
        return 1

    from cli import main as run_cli
    return run_cli(argv)


if __name__ == "__main__":
    sys.exit(main())
