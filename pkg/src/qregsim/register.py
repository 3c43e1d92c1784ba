"""Sparse lab-states over a rank-r qubit register.

A computational-basis state is an integer ``a = sum(i_j * 2**j)``: bit ``j``
is the occupation of qubit ``j``.  States map basis indices to complex
amplitudes and are never densified here.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import NormalizationError, RegisterError

MAX_RANK = 63
PRUNE_THRESHOLD = 1e-12
NORM_TOLERANCE = 1e-9


def check_rank(rank: int) -> int:
    if not isinstance(rank, int) or isinstance(rank, bool) or not 1 <= rank <= MAX_RANK:
        raise RegisterError(f"register rank must be an integer in [1, {MAX_RANK}], got {rank!r}")
    return rank


def check_qubit(k: int, rank: int) -> int:
    if not isinstance(k, int) or isinstance(k, bool) or not 0 <= k < rank:
        raise RegisterError(f"qubit index {k!r} out of range for rank-{rank} register")
    return k


def check_index(a: int, rank: int) -> int:
    if not isinstance(a, int) or isinstance(a, bool) or not 0 <= a < (1 << rank):
        raise RegisterError(f"basis index {a!r} out of range for rank-{rank} register")
    return a


# -- basis codec --------------------------------------------------------------

def encode_bits(bits: Sequence[int], rank: int | None = None) -> int:
    """Occupation list ``(i_0, ..., i_{r-1})`` to its basis index."""
    if rank is not None and len(bits) != rank:
        raise RegisterError(f"expected {rank} occupations, got {len(bits)}")
    value = 0
    for j, b in enumerate(bits):
        if b not in (0, 1):
            raise RegisterError(f"occupation of qubit {j} must be 0 or 1, got {b!r}")
        value |= int(b) << j
    return value


def decode_index(a: int, rank: int) -> tuple[int, ...]:
    check_index(a, check_rank(rank))
    return tuple((a >> j) & 1 for j in range(rank))


def format_ket(a: int, rank: int, style: str = "bits") -> str:
    """Ket text for basis index ``a``.

    ``bits`` gives ``|101)`` (qubit 0 leftmost), ``decimal`` gives ``|5)``
    and ``base10`` gives ``|5_10)``.
    """
    check_index(a, rank)
    if style == "bits":
        return "|" + "".join(str(b) for b in decode_index(a, rank)) + ")"
    if style == "decimal":
        return f"|{a})"
    if style == "base10":
        return f"|{a}_10)"
    raise ValueError(f"unknown ket style {style!r}")


_KET_RE = re.compile(r"\|\s*(\d+)(_10)?\s*\)")


def parse_ket(text: str, rank: int) -> int:
    """Parse ``|101)``, ``|5)`` or ``|11_10)`` into a basis index.

    A digit string of exactly ``rank`` binary digits is read as an occupation
    list; a ``_10`` suffix forces decimal; anything else is decimal.
    """
    m = _KET_RE.fullmatch(text.strip())
    if m is None:
        raise RegisterError(f"malformed ket {text!r}")
    digits, base10 = m.groups()
    if not base10 and len(digits) == rank and set(digits) <= {"0", "1"}:
        return encode_bits([int(c) for c in digits], rank)
    return check_index(int(digits), rank)


def outcome_index(qubits: Iterable[int]) -> int:
    """Basis index of the coincidence outcome firing exactly ``qubits``."""
    a = 0
    for k in qubits:
        if a >> k & 1:
            raise RegisterError(f"qubit {k} listed twice in outcome")
        a |= 1 << k
    return a


# -- monomials ----------------------------------------------------------------

@dataclass(frozen=True, init=False)
class CreationMonomial:
    """Product of creation operators on distinct qubits, kept in ascending order."""

    indices: tuple[int, ...]

    def __init__(self, indices: Iterable[int] = ()):
        idx = tuple(sorted(int(k) for k in indices))
        if any(k < 0 for k in idx):
            raise RegisterError(f"negative qubit index in monomial {idx}")
        if len(set(idx)) != len(idx):
            raise RegisterError(f"repeated qubit index in creation monomial {list(indices)}")
        object.__setattr__(self, "indices", idx)

    @property
    def mask(self) -> int:
        return outcome_index(self.indices)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __len__(self) -> int:
        return len(self.indices)

    def __contains__(self, k: object) -> bool:
        return k in self.indices

    def __str__(self) -> str:
        return " ".join(f"A+{k}" for k in self.indices) or "1"


# -- states -------------------------------------------------------------------

class SparseState:
    """Immutable sparse register state ``sum_a psi_a |a)``.

    Amplitudes with magnitude below :data:`PRUNE_THRESHOLD` are dropped on
    construction.  Treat :attr:`terms` as read-only.
    """

    __slots__ = ("rank", "terms")

    def __init__(self, rank: int, terms: Mapping[int, complex] | None = None, *, prune: bool = True):
        check_rank(rank)
        clean: dict[int, complex] = {}
        for a, amp in (terms or {}).items():
            check_index(a, rank)
            amp = complex(amp)
            if prune and abs(amp) < PRUNE_THRESHOLD:
                continue
            clean[a] = amp
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    def __setattr__(self, name, value):
        raise AttributeError("SparseState is immutable")

    @classmethod
    def void(cls, rank: int) -> SparseState:
        return cls(rank, {0: 1.0})

    @classmethod
    def zero(cls, rank: int) -> SparseState:
        return cls(rank, {})

    @classmethod
    def basis(cls, rank: int, a: int, amp: complex = 1.0) -> SparseState:
        return cls(rank, {a: amp})

    @classmethod
    def from_monomials(cls, rank: int, terms: Iterable[tuple[complex, CreationMonomial]]) -> SparseState:
        """``sum c * m |0)`` for (coeff, monomial) pairs."""
        out = cls.zero(rank)
        for c, m in terms:
            out = out + c * apply_monomial(cls.void(rank), m)
        return out

    def amplitude(self, a: int) -> complex:
        return self.terms.get(a, 0j)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def items(self):
        return self.terms.items()

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseState):
            return NotImplemented
        return self.rank == other.rank and self.terms == other.terms

    __hash__ = None

    def _check_shape(self, other: SparseState) -> None:
        if self.rank != other.rank:
            raise RegisterError(f"shape mismatch: rank {self.rank} vs rank {other.rank}")

    def __add__(self, other: SparseState) -> SparseState:
        self._check_shape(other)
        out = dict(self.terms)
        for a, amp in other.terms.items():
            out[a] = out.get(a, 0j) + amp
        return SparseState(self.rank, out)

    def __sub__(self, other: SparseState) -> SparseState:
        return self + (-1) * other

    def __mul__(self, c: complex) -> SparseState:
        return SparseState(self.rank, {a: c * amp for a, amp in self.terms.items()})

    __rmul__ = __mul__

    def __neg__(self) -> SparseState:
        return -1 * self

    def max_deviation(self, other: SparseState) -> float:
        """Largest entrywise ``|self_a - other_a|``."""
        self._check_shape(other)
        keys = set(self.terms) | set(other.terms)
        return max((abs(self.amplitude(a) - other.amplitude(a)) for a in keys), default=0.0)

    def __repr__(self) -> str:
        body = " + ".join(f"({amp:.6g}){format_ket(a, self.rank)}" for a, amp in self.terms.items())
        return f"SparseState(rank={self.rank}, {body or '0'})"


def apply_creation(state: SparseState, k: int) -> SparseState:
    """Apply the creation operator on qubit ``k``; occupied terms vanish."""
    check_qubit(k, state.rank)
    bit = 1 << k
    return SparseState(state.rank, {a | bit: amp for a, amp in state.terms.items() if not a & bit})


def apply_monomial(state: SparseState, m: CreationMonomial) -> SparseState:
    for k in m:
        check_qubit(k, state.rank)
    mask = m.mask
    return SparseState(state.rank, {a | mask: amp for a, amp in state.terms.items() if not a & mask})


def inner_product(x: SparseState, y: SparseState) -> complex:
    """``(x|y)``, conjugate-linear in ``x``."""
    x._check_shape(y)
    if len(x) > len(y):
        return sum((x.terms[a].conjugate() * amp for a, amp in y.terms.items() if a in x.terms), 0j)
    return sum((amp.conjugate() * y.terms[a] for a, amp in x.terms.items() if a in y.terms), 0j)


def norm(state: SparseState) -> float:
    return math.sqrt(sum(abs(amp) ** 2 for amp in state.terms.values()))


def _require_normalized(state: SparseState, tol: float) -> None:
    n = norm(state)
    if abs(n - 1.0) > tol:
        raise NormalizationError(f"state norm {n:.12g} differs from 1 by more than {tol:g}")


def born_exclusive(state: SparseState, outcome: int, *, check_norm: bool = True,
                   tol: float = NORM_TOLERANCE) -> float:
    """Probability ``|(outcome|state)|^2`` of the exact basis outcome."""
    check_index(outcome, state.rank)
    if check_norm:
        _require_normalized(state, tol)
    return abs(state.amplitude(outcome)) ** 2


def born_marginal(state: SparseState, k: int, *, check_norm: bool = True,
                  tol: float = NORM_TOLERANCE) -> float:
    """Probability that qubit ``k`` fires, summed over all outcomes."""
    check_qubit(k, state.rank)
    if check_norm:
        _require_normalized(state, tol)
    bit = 1 << k
    return sum(abs(amp) ** 2 for a, amp in state.terms.items() if a & bit)


@dataclass(frozen=True)
class RankReport:
    ranks: tuple[int, ...]

    @property
    def homogeneous(self) -> bool:
        return len(self.ranks) == 1


def state_rank(state: SparseState) -> RankReport:
    if state.is_zero:
        raise RegisterError("rank of the zero state is undefined")
    return RankReport(tuple(sorted({a.bit_count() for a in state.terms})))
