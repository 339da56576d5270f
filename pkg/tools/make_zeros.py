"""Regenerate src/gel/data/zeta_zeros.txt (ordinates of the first zeta zeros).

Development-only: needs mpmath.  Usage: python3 tools/make_zeros.py [count]
"""

import sys
from pathlib import Path

import mpmath

OUT = Path(__file__).resolve().parents[1] / "src" / "gel" / "data" / "zeta_zeros.txt"


def main(count=200):
    mpmath.mp.dps = 25
    lines = ["gel-zeros v1", f"# first {count} ordinates, mpmath.zetazero at 25 digits"]
    for k in range(1, count + 1):
        lines.append(repr(float(mpmath.zetazero(k).imag)))
    OUT.write_text("\n".join(lines) + "\n", encoding="ascii")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 200)
