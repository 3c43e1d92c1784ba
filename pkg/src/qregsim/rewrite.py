"""Transition rules, stages and experiment programs.

A rule replaces the creation operator on its source qubit by a weighted sum
of creation monomials.  A stage applies several rules at once; a program is
an initial lab-state followed by an ordered list of stages and a set of
named detector outcomes.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import ProgramError, RuleError
from .register import (
    NORM_TOLERANCE,
    CreationMonomial,
    RankReport,
    RegisterError,
    SparseState,
    born_exclusive,
    born_marginal,
    check_qubit,
    check_rank,
    inner_product,
    norm,
    outcome_index,
    state_rank,
)

ISOMETRY_TOLERANCE = 1e-10

Term = tuple[complex, CreationMonomial]


def _as_monomial(m) -> CreationMonomial:
    return m if isinstance(m, CreationMonomial) else CreationMonomial(m)


@dataclass(frozen=True, init=False)
class TransitionRule:
    """``A+_source -> sum(coeff * monomial)``.

    Targets sharing a monomial are merged (coefficients summed) in order of
    first appearance.
    """

    source: int
    targets: tuple[Term, ...]

    def __init__(self, source: int, targets: Iterable[tuple[complex, Iterable[int] | CreationMonomial]]):
        if not isinstance(source, int) or source < 0:
            raise RuleError(f"rule source must be a non-negative qubit index, got {source!r}")
        merged: dict[CreationMonomial, complex] = {}
        for coeff, m in targets:
            m = _as_monomial(m)
            if source in m:
                raise RuleError(f"source qubit {source} appears in its own target {m}")
            merged[m] = merged.get(m, 0j) + complex(coeff)
        if not merged:
            raise RuleError(f"rule for qubit {source} has no targets")
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "targets", tuple((c, m) for m, c in merged.items()))

    @property
    def qubits(self) -> set[int]:
        out = {self.source}
        for _, m in self.targets:
            out.update(m)
        return out

    def target_qubits(self) -> set[int]:
        return self.qubits - {self.source}

    def __str__(self) -> str:
        rhs = " + ".join(f"({c}) {m}" for c, m in self.targets)
        return f"A+{self.source} -> {rhs}"


@dataclass(frozen=True)
class Stage:
    """A set of rules applied simultaneously."""

    name: str
    rules: tuple[TransitionRule, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        sources = [r.source for r in self.rules]
        dup = sorted({s for s in sources if sources.count(s) > 1})
        if dup:
            raise RuleError(f"stage {self.name!r}: qubit(s) {dup} are the source of more than one rule")
        src = set(sources)
        for r in self.rules:
            fed = r.target_qubits() & src
            if fed:
                raise RuleError(
                    f"stage {self.name!r}: rule for A+{r.source} targets qubit(s) {sorted(fed)} "
                    "which are sources in the same stage")

    @property
    def sources(self) -> tuple[int, ...]:
        return tuple(r.source for r in self.rules)

    @property
    def qubits(self) -> set[int]:
        return set().union(*(r.qubits for r in self.rules)) if self.rules else set()


def apply_rule(state: SparseState, rule: TransitionRule) -> SparseState:
    check_qubit(rule.source, state.rank)
    for k in rule.target_qubits():
        check_qubit(k, state.rank)
    bit = 1 << rule.source
    out: dict[int, complex] = {}
    for a, amp in state.terms.items():
        if not a & bit:
            out[a] = out.get(a, 0j) + amp
            continue
        base = a & ~bit
        for coeff, m in rule.targets:
            mask = m.mask
            if base & mask:
                continue
            b = base | mask
            out[b] = out.get(b, 0j) + coeff * amp
    return SparseState(state.rank, out)


def apply_stage(state: SparseState, stage: Stage) -> SparseState:
    """Substitute every rule of ``stage`` at once."""
    rules = {}
    for r in stage.rules:
        check_qubit(r.source, state.rank)
        for k in r.target_qubits():
            check_qubit(k, state.rank)
        rules[r.source] = [(c, m.mask) for c, m in r.targets]
    src_mask = sum(1 << s for s in rules)
    out: dict[int, complex] = {}
    for a, amp in state.terms.items():
        hit = a & src_mask
        if not hit:
            out[a] = out.get(a, 0j) + amp
            continue
        partial = {a & ~src_mask: amp}
        for s, targets in rules.items():
            if not hit >> s & 1:
                continue
            nxt: dict[int, complex] = {}
            for b, c in partial.items():
                for coeff, mask in targets:
                    if b & mask:
                        continue
                    nxt[b | mask] = nxt.get(b | mask, 0j) + coeff * c
            partial = nxt
        for b, c in partial.items():
            out[b] = out.get(b, 0j) + c
    return SparseState(state.rank, out)


def compose_stages(first: Stage, second: Stage, name: str | None = None) -> Stage:
    """Single stage equivalent to ``first`` followed by ``second``.

    Each rule of ``first`` has ``second`` substituted into its targets; rules
    of ``second`` whose source ``first`` does not rewrite are carried over.
    Agreement with sequential application holds on states where no
    intermediate target collides with an occupied qubit, e.g. rank-preserving
    rank-1 chains.
    """
    sub = {r.source: r.targets for r in second.rules}
    rules = []
    for r in first.rules:
        terms: dict[CreationMonomial, complex] = {}
        for coeff, m in r.targets:
            factors = [sub.get(k, ((1 + 0j, CreationMonomial([k])),)) for k in m]
            for combo in itertools.product(*factors):
                idx = [k for _, mm in combo for k in mm]
                if len(set(idx)) != len(idx):
                    continue
                c = coeff
                for cc, _ in combo:
                    c *= cc
                mm = CreationMonomial(idx)
                terms[mm] = terms.get(mm, 0j) + c
        if not terms:
            raise RuleError(f"composition annihilates every target of the rule for A+{r.source}")
        rules.append(TransitionRule(r.source, [(c, m) for m, c in terms.items()]))
    rewritten = {r.source for r in first.rules}
    rules.extend(r for r in second.rules if r.source not in rewritten)
    return Stage(name or f"{first.name}+{second.name}", tuple(rules))


# -- programs -----------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentProgram:
    rank: int
    initial: SparseState
    stages: tuple[Stage, ...] = ()
    detectors: Mapping[str, tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self):
        check_rank(self.rank)
        object.__setattr__(self, "stages", tuple(self.stages))
        object.__setattr__(self, "detectors",
                           {name: tuple(sorted(q)) for name, q in self.detectors.items()})
        if self.initial.rank != self.rank:
            raise ProgramError(f"initial state has rank {self.initial.rank}, program rank is {self.rank}")
        names = [s.name for s in self.stages]
        dup = sorted({n for n in names if names.count(n) > 1})
        if dup:
            raise ProgramError(f"duplicate stage name(s): {dup}")
        for s in self.stages:
            for k in s.qubits:
                if k >= self.rank:
                    raise ProgramError(f"stage {s.name!r} uses qubit {k} >= rank {self.rank}")
        for name, qubits in self.detectors.items():
            if not qubits:
                raise ProgramError(f"detector {name!r} names no qubits")
            for k in qubits:
                if k >= self.rank:
                    raise ProgramError(f"detector {name!r} uses qubit {k} >= rank {self.rank}")
            try:
                outcome_index(qubits)
            except RegisterError as exc:
                raise ProgramError(f"detector {name!r}: {exc}") from None

    def outcome(self, detector: str) -> int:
        return outcome_index(self.detectors[detector])


@dataclass
class RunReport:
    state: SparseState
    detectors: dict[str, float]
    marginals: dict[int, float]
    norm: float
    rank: RankReport | None
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return abs(self.norm - 1.0) <= NORM_TOLERANCE


def trace_program(program: ExperimentProgram) -> list[SparseState]:
    """States before the first stage and after each stage."""
    states = [program.initial]
    for stage in program.stages:
        states.append(apply_stage(states[-1], stage))
    return states


def run_program(program: ExperimentProgram) -> RunReport:
    final = program.initial
    for stage in program.stages:
        final = apply_stage(final, stage)
    n = norm(final)
    warnings = []
    if abs(n - 1.0) > NORM_TOLERANCE:
        warnings.append(f"final norm {n:.12g} differs from 1 by more than {NORM_TOLERANCE:g}")
    rank = None
    if final.is_zero:
        warnings.append("final state is the zero vector")
    else:
        rank = state_rank(final)
        if not rank.homogeneous:
            warnings.append(f"final state mixes ranks {list(rank.ranks)}")
    detectors = {name: born_exclusive(final, program.outcome(name), check_norm=False)
                 for name in program.detectors}
    marginals = {k: born_marginal(final, k, check_norm=False) for k in range(program.rank)}
    return RunReport(final, detectors, marginals, n, rank, warnings)


# -- isometry diagnostics -----------------------------------------------------

@dataclass(frozen=True)
class IsometryReport:
    passed: bool
    max_deviation: float
    domain: tuple[int, ...]


def natural_domain(stage: Stage) -> list[int]:
    """The void plus one excitation on each source qubit."""
    return [0] + [1 << s for s in stage.sources]


def check_isometry(stage: Stage, rank: int, domain: Sequence[int] | None = None,
                   tol: float = ISOMETRY_TOLERANCE) -> IsometryReport:
    """Compare the Gram matrix of the images of ``domain`` against the identity."""
    if domain is None:
        domain = natural_domain(stage)
    domain = tuple(sorted(set(domain)))
    images = [apply_stage(SparseState.basis(rank, a), stage) for a in domain]
    worst = 0.0
    for i, x in enumerate(images):
        for j in range(i, len(images)):
            expected = 1.0 if i == j else 0.0
            worst = max(worst, abs(inner_product(x, images[j]) - expected))
    return IsometryReport(worst <= tol, worst, domain)


def check_program(program: ExperimentProgram, tol: float = ISOMETRY_TOLERANCE) -> list[tuple[str, IsometryReport]]:
    """Per-stage isometry on the natural domain plus the basis states reaching that stage."""
    states = trace_program(program)
    out = []
    for stage, before in zip(program.stages, states):
        domain = set(natural_domain(stage)) | set(before.terms)
        out.append((stage.name, check_isometry(stage, program.rank, sorted(domain), tol)))
    return out
