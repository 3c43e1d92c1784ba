"""Quantum register simulation of laboratory experiments.

Apparatus is modelled as a register with one qubit per detection site.
Lab-states are sparse superpositions of basis states, and each apparatus
module is a rule rewriting the creation operator on one qubit into a sum of
creation monomials.
"""
from .algebra import QubitOp, ScaledQubitOp, qop, qop_matrix, qop_mul
from .catalog import beam_splitter, pair_source, pvm_test, single_channel_map
from .dsl import DSLError, parse_experiment, format_program
from .errors import NormalizationError, ProgramError, QRegError, RegisterError, RuleError
from .register import (
    CreationMonomial,
    SparseState,
    apply_creation,
    apply_monomial,
    born_exclusive,
    born_marginal,
    decode_index,
    encode_bits,
    inner_product,
    norm,
    outcome_index,
    state_rank,
)
from .rewrite import (
    ExperimentProgram,
    RunReport,
    Stage,
    TransitionRule,
    apply_rule,
    apply_stage,
    check_isometry,
    compose_stages,
    run_program,
)

__version__ = "0.1.0"
