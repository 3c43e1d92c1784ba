"""Single-qubit computational-basis operator algebra.

The eight basis operators P0, P1, A, Adag and the four sigma matrices
close under multiplication up to a scalar in {0, +-1, +-i}.  Products are
read from a literal multiplication table; :func:`qop_matrix` gives the
2x2 representation used to cross-check it.

Basis convention: ``|1) = (1, 0)^T`` and ``|0) = (0, 1)^T``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class QubitOp(enum.Enum):
    P0 = "P0"
    P1 = "P1"
    A = "A"
    Adag = "Adag"
    S0 = "S0"
    S1 = "S1"
    S2 = "S2"
    S3 = "S3"


@dataclass(frozen=True)
class ScaledQubitOp:
    """``coeff * op``; ``op is None`` is the zero operator (coeff forced to 0)."""

    coeff: complex
    op: QubitOp | None

    def __post_init__(self):
        if self.op is None and self.coeff != 0:
            object.__setattr__(self, "coeff", 0j)

    @property
    def is_zero(self) -> bool:
        return self.op is None

    def __mul__(self, other: ScaledQubitOp) -> ScaledQubitOp:
        return qop_mul(self, other)

    def __str__(self) -> str:
        if self.op is None:
            return "0"
        return f"{_scalar_str(self.coeff)}{self.op.value}"


ZERO = ScaledQubitOp(0j, None)

# Operators appearing as rows/columns of the published table, in order.
TABLE_KINDS = (
    QubitOp.P0, QubitOp.P1, QubitOp.A, QubitOp.Adag,
    QubitOp.S1, QubitOp.S2, QubitOp.S3,
)

_ONE, _I = 1 + 0j, 1j
_P0, _P1, _A, _AD = QubitOp.P0, QubitOp.P1, QubitOp.A, QubitOp.Adag
_S0, _S1, _S2, _S3 = QubitOp.S0, QubitOp.S1, QubitOp.S2, QubitOp.S3

# Table body, row-major: entry (row, col) is row * col.  None marks a zero entry.
_TABLE_ROWS = {
    _P0: [(_ONE, _P0), None, (_ONE, _A), None, (_ONE, _A), (_I, _A), (-_ONE, _P0)],
    _P1: [None, (_ONE, _P1), None, (_ONE, _AD), (_ONE, _AD), (-_I, _AD), (_ONE, _P1)],
    _A: [None, (_ONE, _A), None, (_ONE, _P0), (_ONE, _P0), (-_I, _P0), (_ONE, _A)],
    _AD: [(_ONE, _AD), None, (_ONE, _P1), None, (_ONE, _P1), (_I, _P1), (-_ONE, _AD)],
    _S1: [(_ONE, _AD), (_ONE, _A), (_ONE, _P1), (_ONE, _P0), (_ONE, _S0), (_I, _S3), (-_I, _S2)],
    _S2: [(-_I, _AD), (_I, _A), (-_I, _P1), (_I, _P0), (-_I, _S3), (_ONE, _S0), (_I, _S1)],
    _S3: [(-_ONE, _P0), (_ONE, _P1), (-_ONE, _A), (_ONE, _AD), (_I, _S2), (-_I, _S1), (_ONE, _S0)],
}

TABLE: dict[tuple[QubitOp, QubitOp], ScaledQubitOp] = {}
for _row, _entries in _TABLE_ROWS.items():
    for _col, _entry in zip(TABLE_KINDS, _entries):
        TABLE[_row, _col] = ZERO if _entry is None else ScaledQubitOp(*_entry)


def qop(op: QubitOp | str, coeff: complex = 1) -> ScaledQubitOp:
    if isinstance(op, str):
        op = QubitOp(op)
    return ScaledQubitOp(complex(coeff), op)


def qop_mul(x: ScaledQubitOp, y: ScaledQubitOp) -> ScaledQubitOp:
    """Product of two same-qubit operators; zero is absorbing and S0 is the identity."""
    if x.op is None or y.op is None:
        return ZERO
    coeff = x.coeff * y.coeff
    if x.op is _S0:
        return ScaledQubitOp(coeff, y.op)
    if y.op is _S0:
        return ScaledQubitOp(coeff, x.op)
    entry = TABLE[x.op, y.op]
    if entry.op is None:
        return ZERO
    return ScaledQubitOp(coeff * entry.coeff, entry.op)


# Outer products in the |1)=(1,0), |0)=(0,1) convention.
_KET1 = np.array([1, 0], dtype=complex)
_KET0 = np.array([0, 1], dtype=complex)

_MATRICES = {
    _P0: np.outer(_KET0, _KET0),
    _P1: np.outer(_KET1, _KET1),
    _A: np.outer(_KET0, _KET1),
    _AD: np.outer(_KET1, _KET0),
}
_MATRICES[_S0] = _MATRICES[_P1] + _MATRICES[_P0]
_MATRICES[_S1] = _MATRICES[_A] + _MATRICES[_AD]
_MATRICES[_S2] = 1j * _MATRICES[_A] - 1j * _MATRICES[_AD]
_MATRICES[_S3] = _MATRICES[_P1] - _MATRICES[_P0]


def qop_matrix(x: ScaledQubitOp) -> np.ndarray:
    if x.op is None:
        return np.zeros((2, 2), dtype=complex)
    return x.coeff * _MATRICES[x.op]


def ket_vector(bit: int) -> np.ndarray:
    """Column vector of the single-qubit basis state ``|bit)``."""
    if bit not in (0, 1):
        raise ValueError(f"qubit occupation must be 0 or 1, got {bit!r}")
    return (_KET1 if bit else _KET0).copy()


def _scalar_str(c: complex) -> str:
    for value, text in ((1, ""), (-1, "-"), (1j, "i"), (-1j, "-i")):
        if c == value:
            return text
    return f"({c})"


_SYMBOLS = {
    _P0: "P0", _P1: "P1", _A: "A", _AD: "A+",
    _S0: "s0", _S1: "s1", _S2: "s2", _S3: "s3",
}


def format_table() -> str:
    """Render the 7x7 product table, rows times columns."""
    def cell(x: ScaledQubitOp) -> str:
        if x.op is None:
            return "0"
        return _scalar_str(x.coeff) + _SYMBOLS[x.op]

    header = [""] + [_SYMBOLS[k] for k in TABLE_KINDS]
    rows = [header]
    for r in TABLE_KINDS:
        rows.append([_SYMBOLS[r]] + [cell(TABLE[r, c]) for c in TABLE_KINDS])
    width = max(len(c) for row in rows for c in row) + 2
    return "\n".join("".join(c.rjust(width) for c in row).rstrip() for row in rows) + "\n"
