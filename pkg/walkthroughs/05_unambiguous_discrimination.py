"""
Telling two non-orthogonal states apart
=======================================

A prism, a lossy beam splitter and a second splitter sort the input into
"u", "v" and an inconclusive port.  The detector statistics match the closed
forms |alpha+beta|^2 cos(theta), |alpha|^2 (1-cos theta), |beta|^2 (1-cos theta).
"""
import math

from qregsim import corpus
from qregsim.rewrite import check_program, run_program

for theta in (math.pi / 6, math.pi / 4, math.pi / 3):
    a = 1 / math.sqrt(2 + 2 * math.cos(theta))
    prog = corpus.load("povm_interference", {"theta": theta, "alpha": a, "beta": a})
    p = run_program(prog).detectors
    print(f"theta={theta:.3f}", {k: round(v, 6) for k, v in p.items()},
          "closed form ?:", round(4 * a * a * math.cos(theta), 6))

# every stage preserves inner products on the states it sees
for name, rep in check_program(corpus.load("povm_interference")):
    print(name, rep.passed, f"{rep.max_deviation:.1e}")
