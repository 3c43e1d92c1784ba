"""Stage constructors for common apparatus modules."""
from __future__ import annotations

import cmath
from typing import Sequence

from .errors import RuleError
from .register import CreationMonomial
from .rewrite import Stage, TransitionRule

UNIT_TOLERANCE = 1e-9


def _distinct(qubits: Sequence[int], what: str) -> None:
    if len(set(qubits)) != len(qubits):
        raise RuleError(f"{what}: qubits {list(qubits)} are not distinct")


def pvm_test(src: int, outs: Sequence[int], amps: Sequence[complex], name: str = "pvm") -> Stage:
    """Von Neumann test: ``A+_src -> sum(amps[i] * A+_outs[i])``.

    Covers Stern-Gerlach devices and Wollaston prisms (two outcomes).  The
    amplitudes are not required to be normalized.
    """
    if len(outs) != len(amps):
        raise RuleError(f"pvm_test: {len(outs)} outcome qubits but {len(amps)} amplitudes")
    if not outs:
        raise RuleError("pvm_test: at least one outcome qubit is required")
    _distinct([src, *outs], "pvm_test")
    return Stage(name, (TransitionRule(src, [(a, [q]) for q, a in zip(outs, amps)]),))


def beam_splitter(in1: int, in2: int, out1: int, out2: int, a: complex, b: complex,
                  eta: float = 0.0, name: str = "bs") -> Stage:
    """Lossless beam splitter with matrix ``exp(i*eta) * [[a, b], [-b*, a*]]``.

    Port ``in1`` goes to ``exp(i*eta) * (a*out1 - conj(b)*out2)`` and ``in2``
    to ``exp(i*eta) * (b*out1 + conj(a)*out2)``.
    """
    _distinct([in1, in2, out1, out2], "beam_splitter")
    a, b = complex(a), complex(b)
    if abs(abs(a) ** 2 + abs(b) ** 2 - 1) > UNIT_TOLERANCE:
        raise RuleError(f"beam_splitter: |a|^2 + |b|^2 = {abs(a) ** 2 + abs(b) ** 2:.12g}, expected 1")
    if abs(complex(eta).imag) > 0:
        raise RuleError(f"beam_splitter: eta must be real, got {eta!r}")
    ph = cmath.exp(1j * complex(eta).real)
    return Stage(name, (
        TransitionRule(in1, [(ph * a, [out1]), (-ph * b.conjugate(), [out2])]),
        TransitionRule(in2, [(ph * b, [out1]), (ph * a.conjugate(), [out2])]),
    ))


def single_channel_map(src: int, dst: int, factor: complex = 1, name: str = "map") -> Stage:
    """Phase shifter, mirror or rotator: ``A+_src -> factor * A+_dst`` with ``|factor| = 1``."""
    _distinct([src, dst], "single_channel_map")
    factor = complex(factor)
    if abs(abs(factor) - 1) > UNIT_TOLERANCE:
        raise RuleError(f"single_channel_map: |factor| = {abs(factor):.12g}, expected 1")
    return Stage(name, (TransitionRule(src, [(factor, [dst])]),))


def pair_source(src: int, pairs: Sequence[tuple[complex, tuple[int, int]]], name: str = "pair") -> Stage:
    """Rank-raising source ``A+_src -> sum(c * A+_qa A+_qb)``; coefficients must be normalized."""
    if not pairs:
        raise RuleError("pair_source: no pairs given")
    total = 0.0
    targets = []
    for coeff, (qa, qb) in pairs:
        if src in (qa, qb):
            raise RuleError(f"pair_source: source qubit {src} appears in pair {(qa, qb)}")
        _distinct([qa, qb], "pair_source")
        total += abs(complex(coeff)) ** 2
        targets.append((coeff, CreationMonomial([qa, qb])))
    if abs(total - 1) > UNIT_TOLERANCE:
        raise RuleError(f"pair_source: sum of |coeff|^2 is {total:.12g}, expected 1")
    return Stage(name, (TransitionRule(src, targets),))


def merge_stages(name: str, *stages: Stage) -> Stage:
    """Union of the rules of several stages acting in the same time slot."""
    return Stage(name, tuple(r for s in stages for r in s.rules))
