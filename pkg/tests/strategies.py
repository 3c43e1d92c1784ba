from hypothesis import strategies as st

from qregsim.register import SparseState

amplitudes = st.builds(
    complex,
    st.floats(-2, 2, allow_nan=False).filter(lambda x: abs(x) > 1e-3),
    st.floats(-2, 2, allow_nan=False),
)


@st.composite
def sparse_states(draw, rank=None, max_terms=6):
    r = draw(st.integers(1, 8)) if rank is None else rank
    keys = draw(st.lists(st.integers(0, 2 ** r - 1), min_size=0, max_size=max_terms, unique=True))
    return SparseState(r, {k: draw(amplitudes) for k in keys})


@st.composite
def normalized_states(draw, rank=None):
    s = draw(sparse_states(rank=rank).filter(lambda s: not s.is_zero))
    n = sum(abs(a) ** 2 for a in s.terms.values()) ** 0.5
    return (1 / n) * s
