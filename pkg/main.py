"""
WorldGrow - blockweise unendliche 3D-Welten
Einstiegspunkt der Kommandozeile
"""
import sys

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
