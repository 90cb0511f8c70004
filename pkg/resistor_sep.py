"""Command-line entry point: python resistor_sep.py <command> [options]."""
from src.cli.main import main

if __name__ == "__main__":
    main()
