"""
Cross-checking against dense matrices
=====================================

Each stage can also be built as a 2**r by 2**r matrix from Kronecker
products.  For small registers this gives an independent check on the sparse
engine.
"""
from qregsim import corpus
from qregsim.oracle import compare_states, dense_run, dense_stage
from qregsim.rewrite import run_program

for name in corpus.NAMES:
    prog = corpus.load(name)
    err = compare_states(run_program(prog).state, dense_run(prog))
    print(f"{name:20s} rank {prog.rank:2d}  max |sparse - dense| = {err:.1e}")

m = dense_stage(corpus.load("stern_gerlach").stages[0], 3)
print(m.real.round(2))
