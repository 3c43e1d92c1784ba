"""
A Stern-Gerlach measurement
===========================

The source site 0 feeds two detection sites.  Outcome probabilities follow
from the Born rule applied to the final register state.
"""
from qregsim import catalog
from qregsim.register import SparseState, born_exclusive
from qregsim.rewrite import apply_stage

alpha, beta = 0.6, 0.8j
stage = catalog.pvm_test(0, [1, 2], [alpha, beta], name="sg")
final = apply_stage(SparseState.basis(3, 1), stage)
for a in range(8):
    print(a, round(born_exclusive(final, a), 12))

# The same thing from the bundled text description
from qregsim import corpus
from qregsim.rewrite import run_program
print(run_program(corpus.load("stern_gerlach")).detectors)
