"""
Registers, basis labels and creation operators
==============================================

A register of rank r holds one qubit per detection site.  Basis states are
labelled by the integer sum of 2**j over occupied sites j.
"""
from qregsim import CreationMonomial, SparseState, apply_creation, apply_monomial
from qregsim.register import format_ket
from qregsim.register import decode_index, encode_bits

print(encode_bits((1, 0, 1)), decode_index(11, 4))
print(format_ket(5, 3), format_ket(5, 3, style="decimal"))

# the void state is the idle apparatus; creation operators excite sites
void = SparseState.void(4)
s = apply_monomial(void, CreationMonomial([0, 3]))
print(s)

# exciting an occupied site annihilates the state
print(apply_creation(s, 0).is_zero)
