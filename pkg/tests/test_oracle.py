import numpy as np
import pytest
from hypothesis import given, strategies as st

from qregsim import catalog, corpus
from qregsim.errors import RegisterError
from qregsim.oracle import (basis_vector, compare_states, dense_monomial, dense_run, dense_stage,
                            densify, substitute_basis)
from qregsim.register import CreationMonomial, SparseState, apply_monomial
from qregsim.rewrite import apply_stage, run_program

from strategies import sparse_states


def test_basis_vector_layout():
    # |1) = (1, 0), |0) = (0, 1); qubit 0 is the rightmost factor
    assert np.array_equal(basis_vector(1, 1), [1, 0])
    assert np.array_equal(basis_vector(0, 1), [0, 1])
    for a in range(8):
        v = basis_vector(a, 3)
        assert v[7 - a] == 1 and v.sum() == 1


def test_dense_monomial_examples():
    assert np.array_equal(dense_monomial(CreationMonomial([0]), 1), [[0, 1], [0, 0]])
    m = dense_monomial(CreationMonomial([1]), 2)
    assert np.array_equal(m @ basis_vector(0, 2), basis_vector(2, 2))
    assert np.array_equal(m @ basis_vector(1, 2), basis_vector(3, 2))
    assert not np.any(m @ basis_vector(2, 2))


def test_monomial_order_and_nilpotency():
    a0, a2 = dense_monomial(CreationMonomial([0]), 3), dense_monomial(CreationMonomial([2]), 3)
    both = dense_monomial(CreationMonomial([2, 0]), 3)
    assert np.array_equal(a0 @ a2, both) and np.array_equal(a2 @ a0, both)
    assert not np.any(a0 @ a0)


def test_monomial_out_of_range():
    with pytest.raises(RegisterError):
        dense_monomial(CreationMonomial([3]), 3)


@given(sparse_states(rank=4), st.sets(st.integers(0, 3), max_size=3))
def test_sparse_creation_matches_dense(state, qubits):
    m = CreationMonomial(sorted(qubits))
    dense = dense_monomial(m, 4) @ densify(state)
    assert compare_states(apply_monomial(state, m), dense) < 1e-12


def test_sg_stage_columns():
    stage = catalog.pvm_test(0, [1, 2], [0.6, 0.8])
    mat = dense_stage(stage, 3)
    assert np.allclose(mat @ basis_vector(1, 3), 0.6 * basis_vector(2, 3) + 0.8 * basis_vector(4, 3))
    assert np.array_equal(mat @ basis_vector(0, 3), basis_vector(0, 3))
    assert np.array_equal(mat @ basis_vector(2, 3), basis_vector(2, 3))
    # a source that lands on an already occupied outcome site collides and vanishes in that branch
    assert substitute_basis(stage, 3, 3) == {6: 0.8}


def test_compare_states():
    s = SparseState(2, {1: 0.6, 2: 0.8j})
    assert compare_states(s, densify(s)) == 0
    assert compare_states(s, np.zeros(4)) == pytest.approx(0.8)
    with pytest.raises(RegisterError):
        compare_states(s, np.zeros(8))


def test_rank_limit():
    with pytest.raises(RegisterError):
        basis_vector(0, 13)
    with pytest.raises(RegisterError):
        densify(SparseState.void(13))


@pytest.mark.parametrize("name", corpus.NAMES)
def test_bundled_programs_match_dense(name):
    prog = corpus.load(name)
    assert compare_states(run_program(prog).state, dense_run(prog)) < 1e-10


@pytest.mark.parametrize("name", corpus.NAMES)
def test_stage_matrices_match_sparse_on_random_states(name, rng):
    prog = corpus.load(name)
    for stage in prog.stages:
        mat = dense_stage(stage, prog.rank)
        idx = rng.choice(2 ** prog.rank, size=min(6, 2 ** prog.rank), replace=False)
        amps = rng.normal(size=len(idx)) + 1j * rng.normal(size=len(idx))
        s = SparseState(prog.rank, dict(zip(map(int, idx), amps)))
        assert compare_states(apply_stage(s, stage), mat @ densify(s)) < 1e-12
