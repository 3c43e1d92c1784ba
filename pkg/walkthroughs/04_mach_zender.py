"""
Mach-Zender fringes
===================

Sweeping the phase shifter moves probability between the two output
detectors while their sum stays at one.
"""
import math

from qregsim import corpus
from qregsim.cli import sweep_rows

header, rows, ok = sweep_rows(corpus.source("mach_zender"), "phi", 0, 2 * math.pi, 9)
print(",".join(header))
for phi, d1, d2 in rows:
    print(f"{phi:.4f}  D1={d1:.4f}  D2={d2:.4f}  sum={d1 + d2:.12f}")
