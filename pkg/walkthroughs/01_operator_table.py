"""
Single-qubit operator products
==============================

Projectors, the raising and lowering operators and the Pauli matrices close
under multiplication up to a scalar.  The product table is built in and can
be checked against plain 2x2 matrices.
"""
import numpy as np

from qregsim.algebra import TABLE_KINDS, qop, qop_matrix, qop_mul, format_table

print(format_table())

# sigma1 * sigma2 = i sigma3
print(qop_mul(qop("S1"), qop("S2")))

# every entry agrees with the matrix product
ok = all(np.array_equal(qop_matrix(qop_mul(qop(x), qop(y))), qop_matrix(qop(x)) @ qop_matrix(qop(y)))
         for x in TABLE_KINDS for y in TABLE_KINDS)
print("matrix check:", ok)
