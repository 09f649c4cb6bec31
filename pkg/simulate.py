"""
Command-line entry point, e.g.

    python simulate.py unitary
    python simulate.py fidelity --preset lab --samples 10000
    python simulate.py sweep --axis epsilon --values 0,0.02,0.05,0.07 --format csv
"""
import sys

from iontoffoli.cli import main

if __name__ == "__main__":
    sys.exit(main())
