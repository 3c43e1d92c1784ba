"""
Entangled pairs
===============

A pair source raises the register from rank one to rank two.  In the
two-particle interferometer the coincidence rates oscillate with the phase
difference while every single-site marginal stays at one half.
"""
import math

import numpy as np

from qregsim import corpus
from qregsim.rewrite import run_program

rep = run_program(corpus.load("epr", {"theta": math.pi / 2, "phi": 0}))
print("EPR rank:", rep.rank.ranks, rep.detectors)

for phi1 in np.linspace(0, 2 * math.pi, 7):
    r = run_program(corpus.load("hsz", {"phi1": float(phi1)}))
    d = r.detectors
    print(f"phi1={phi1:.3f}  c7_9={d['c7_9']:.4f}  c7_10={d['c7_10']:.4f}  P(7)={r.marginals[7]:.4f}")
