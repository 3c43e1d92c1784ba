"""Dense reference simulator used to cross-check the sparse engine.

Register vectors are Kronecker products of single-qubit column vectors in the
``|1) = (1, 0)``, ``|0) = (0, 1)`` convention with qubit 0 as the rightmost
(fastest-varying) factor, so basis index ``a`` sits at position
``2**r - 1 - a``.  Stage matrices are assembled column by column from a
deliberately naive substitution routine that shares no code with
:mod:`qregsim.rewrite`.
"""
from __future__ import annotations

from functools import reduce
from itertools import product

import numpy as np

from .algebra import QubitOp, ket_vector, qop, qop_matrix
from .errors import RegisterError
from .register import CreationMonomial, SparseState

MAX_DENSE_RANK = 12


def _check(rank: int) -> None:
    if not 1 <= rank <= MAX_DENSE_RANK:
        raise RegisterError(f"dense oracle supports ranks 1..{MAX_DENSE_RANK}, got {rank}")


def basis_vector(a: int, rank: int) -> np.ndarray:
    _check(rank)
    factors = [ket_vector((a >> j) & 1) for j in reversed(range(rank))]
    return reduce(np.kron, factors)


def densify(state: SparseState) -> np.ndarray:
    _check(state.rank)
    vec = np.zeros(2 ** state.rank, dtype=complex)
    for a, amp in state.terms.items():
        vec += amp * basis_vector(a, state.rank)
    return vec


def dense_monomial(m: CreationMonomial, rank: int) -> np.ndarray:
    """Kronecker product with the raising matrix on listed qubits and identity elsewhere."""
    _check(rank)
    raise_ = qop_matrix(qop(QubitOp.Adag))
    ident = qop_matrix(qop(QubitOp.S0))
    for k in m:
        if k >= rank:
            raise RegisterError(f"qubit {k} out of range for rank {rank}")
    factors = [raise_ if j in m.indices else ident for j in reversed(range(rank))]
    return reduce(np.kron, factors)


def substitute_basis(stage, a: int, rank: int) -> dict[int, complex]:
    """Image of basis state ``a`` under ``stage``, by brute-force expansion.

    Each occupied qubit is a factor: a rule source expands into its target
    sum, any other qubit stays as itself.  Every combination of choices is
    multiplied out; a choice set occupying some qubit twice is dropped.
    """
    rules = {r.source: r.targets for r in stage.rules}
    occupied = [j for j in range(rank) if a >> j & 1]
    options = []
    for j in occupied:
        if j in rules:
            options.append([(c, list(m.indices)) for c, m in rules[j]])
        else:
            options.append([(1 + 0j, [j])])
    image: dict[int, complex] = {}
    for choice in product(*options):
        qubits = []
        coeff = 1 + 0j
        for c, qs in choice:
            coeff *= c
            qubits.extend(qs)
        if len(qubits) != len(set(qubits)):
            continue
        b = sum(2 ** q for q in qubits)
        image[b] = image.get(b, 0) + coeff
    return image


def dense_stage(stage, rank: int) -> np.ndarray:
    _check(rank)
    dim = 2 ** rank
    mat = np.zeros((dim, dim), dtype=complex)
    for a in range(dim):
        col = dim - 1 - a
        for b, c in substitute_basis(stage, a, rank).items():
            mat[dim - 1 - b, col] += c
    return mat


def compare_states(sparse: SparseState, dense: np.ndarray) -> float:
    """Max entrywise ``|densify(sparse) - dense|``."""
    vec = densify(sparse)
    if vec.shape != np.shape(dense):
        raise RegisterError(f"shape mismatch: {vec.shape} vs {np.shape(dense)}")
    return float(np.max(np.abs(vec - dense))) if vec.size else 0.0


def dense_run(program) -> np.ndarray:
    """Final state vector of ``program`` through dense stage matrices."""
    vec = densify(program.initial)
    for stage in program.stages:
        vec = dense_stage(stage, program.rank) @ vec
    return vec
