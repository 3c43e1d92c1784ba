"""Parser for ``.qreg`` experiment descriptions.

Example::

    register 3
    param alpha = 0.6
    param beta = sqrt(1 - alpha^2)
    init A+0
    stage sg { A+0 -> (alpha) A+1 + (beta) A+2 }
    detect up = 1
    detect down = 2

Items are ``register``, ``param``, ``init``, ``stage`` and ``detect``.  Stage
bodies hold one entry per line: a raw rule ``A+k -> term + term ...`` or a
catalog call ``pvm(...)``, ``bs(...)``, ``map(...)``, ``pair(...)``.  A term is
an optional parenthesised coefficient followed by creation operators
``A+k``; ``init`` terms may use a ket ``|101)``, ``|5)`` or ``|5_10)`` instead.
Expressions are complex-valued and support ``+ - * / ^``, ``i``, ``pi`` and
``exp cos sin tan sqrt conj``.  Angles are radians.
"""
from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass, field
from typing import Callable, Mapping

from . import catalog
from .errors import QRegError, RegisterError, RuleError, ProgramError
from .register import CreationMonomial, SparseState, parse_ket
from .rewrite import ExperimentProgram, Stage, TransitionRule

MAX_DIAGNOSTICS = 20
KEYWORDS = {"register", "param", "init", "stage", "detect"}
CALLS = {"pvm", "bs", "map", "pair"}


@dataclass(frozen=True)
class Diagnostic:
    line: int
    col: int
    message: str
    severity: str = "error"

    def __str__(self) -> str:
        return f"{self.line}:{self.col}: {self.severity}: {self.message}"


class DSLError(QRegError):
    """Raised with every diagnostic collected while reading a document."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


class EvalError(QRegError):
    def __init__(self, message: str, pos: tuple[int, int] = (0, 0)):
        self.pos = pos
        super().__init__(message)


# -- lexer --------------------------------------------------------------------

@dataclass(frozen=True)
class Token:
    kind: str  # NUM INT IDENT CREATE KET ARROW NEWLINE EOF or the punctuation itself
    text: str
    line: int
    col: int

    @property
    def pos(self) -> tuple[int, int]:
        return (self.line, self.col)


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<comment>\#[^\n]*)
  | (?P<newline>\n)
  | (?P<create>A\+(?P<cidx>\d+))
  | (?P<ket>\|\s*\d+(?:_10)?\s*\))
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<arrow>->)
  | (?P<punct>[(){},=+\-*/^])
""", re.VERBOSE)


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, line_start, depth, pos = 1, 0, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise DSLError([Diagnostic(line, col, f"unexpected character {text[pos]!r}")])
        kind = m.lastgroup
        s = m.group()
        if kind == "cidx":
            kind = "create"
        if kind == "newline":
            if depth == 0:
                tokens.append(Token("NEWLINE", s, line, col))
            line += 1
            line_start = m.end()
        elif kind == "create":
            tokens.append(Token("CREATE", m.group("cidx"), line, col))
        elif kind == "ket":
            tokens.append(Token("KET", s, line, col))
        elif kind == "num":
            tokens.append(Token("INT" if s.isdigit() else "NUM", s, line, col))
        elif kind == "ident":
            tokens.append(Token("IDENT", s, line, col))
        elif kind == "arrow":
            tokens.append(Token("ARROW", s, line, col))
        elif kind == "punct":
            if s == "(":
                depth += 1
            elif s == ")":
                depth = max(depth - 1, 0)
            tokens.append(Token(s, s, line, col))
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens


# -- expressions --------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float
    pos: tuple[int, int] = (0, 0)


@dataclass(frozen=True)
class Name:
    """Parameter reference, or the constants ``i`` and ``pi``."""
    name: str
    pos: tuple[int, int] = (0, 0)


@dataclass(frozen=True)
class Neg:
    operand: object
    pos: tuple[int, int] = (0, 0)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object
    pos: tuple[int, int] = (0, 0)


@dataclass(frozen=True)
class Call:
    func: str
    arg: object
    pos: tuple[int, int] = (0, 0)


def _tan(z: complex) -> complex:
    if abs(cmath.cos(z)) < 1e-12:
        raise ZeroDivisionError("tan is not finite at odd multiples of pi/2")
    return cmath.tan(z)


FUNCTIONS: dict[str, Callable[[complex], complex]] = {
    "exp": cmath.exp,
    "cos": cmath.cos,
    "sin": cmath.sin,
    "tan": _tan,
    "sqrt": cmath.sqrt,
    "conj": lambda z: z.conjugate(),
}
CONSTANTS = {"i": 1j, "pi": complex(math.pi)}
RESERVED = KEYWORDS | CALLS | set(FUNCTIONS) | set(CONSTANTS)


def _power(base: complex, exponent: complex) -> complex:
    if exponent.imag == 0 and exponent.real.is_integer() and abs(exponent.real) <= 1024:
        return base ** int(exponent.real)
    if base == 0 and exponent.real <= 0:
        raise ZeroDivisionError("zero raised to a non-positive power")
    return base ** exponent


def eval_expr(ast, env: Mapping[str, complex]) -> complex:
    """Evaluate an expression tree in double-precision complex arithmetic."""
    try:
        if isinstance(ast, Num):
            value = complex(ast.value)
        elif isinstance(ast, Name):
            if ast.name in env:
                value = complex(env[ast.name])
            elif ast.name in CONSTANTS:
                value = CONSTANTS[ast.name]
            else:
                raise EvalError(f"unknown identifier {ast.name!r}", ast.pos)
        elif isinstance(ast, Neg):
            value = -eval_expr(ast.operand, env)
        elif isinstance(ast, BinOp):
            x, y = eval_expr(ast.left, env), eval_expr(ast.right, env)
            if ast.op == "+":
                value = x + y
            elif ast.op == "-":
                value = x - y
            elif ast.op == "*":
                value = x * y
            elif ast.op == "/":
                if y == 0:
                    raise EvalError("division by zero", ast.pos)
                value = x / y
            else:
                value = _power(x, y)
        elif isinstance(ast, Call):
            value = FUNCTIONS[ast.func](eval_expr(ast.arg, env))
        else:
            raise TypeError(f"not an expression node: {ast!r}")
    except (ZeroDivisionError, OverflowError, ValueError) as exc:
        raise EvalError(str(exc), getattr(ast, "pos", (0, 0))) from None
    if not cmath.isfinite(value):
        raise EvalError("expression value is not finite", getattr(ast, "pos", (0, 0)))
    return value


# -- parser -------------------------------------------------------------------

class _Fail(Exception):
    def __init__(self, message: str, pos: tuple[int, int]):
        super().__init__(message)
        self.pos = pos


@dataclass
class _Term:
    coeff: object | None  # expression AST
    qubits: list[tuple[int, tuple[int, int]]]
    ket: Token | None
    pos: tuple[int, int]


@dataclass
class Document:
    """A parsed file: the program plus the evaluated parameter bindings."""
    program: ExperimentProgram
    params: dict[str, complex] = field(default_factory=dict)


class _Parser:
    def __init__(self, text: str, overrides: Mapping[str, complex | str]):
        self.tokens = tokenize(text)
        self.i = 0
        self.diags: list[Diagnostic] = []
        self.overrides = dict(overrides)
        self.env: dict[str, complex] = {}
        self.rank = 1

    # token helpers
    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        self.i = min(self.i + 1, len(self.tokens) - 1)
        return tok

    def at(self, kind: str, text: str | None = None) -> bool:
        tok = self.peek()
        return tok.kind == kind and (text is None or tok.text == text)

    def expect(self, kind: str, what: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            found = "end of line" if tok.kind == "NEWLINE" else "end of file" if tok.kind == "EOF" else repr(tok.text)
            raise _Fail(f"expected {what or kind}, found {found}", tok.pos)
        return self.next()

    def skip_newlines(self) -> None:
        while self.at("NEWLINE"):
            self.next()

    def error(self, message: str, pos: tuple[int, int]) -> None:
        if len(self.diags) < MAX_DIAGNOSTICS:
            self.diags.append(Diagnostic(pos[0], pos[1], message))
        if len(self.diags) >= MAX_DIAGNOSTICS:
            raise DSLError(self.diags)

    def sync_line(self) -> None:
        while not self.at("NEWLINE") and not self.at("EOF"):
            self.next()

    def sync_item(self) -> None:
        while not self.at("EOF"):
            if self.at("NEWLINE"):
                self.next()
                if self.at("IDENT") and self.peek().text in KEYWORDS:
                    return
            else:
                self.next()

    # expressions
    def expr(self):
        node = self.mul()
        while self.peek().kind in ("+", "-"):
            op = self.next()
            node = BinOp(op.kind, node, self.mul(), op.pos)
        return node

    def mul(self):
        node = self.unary()
        while self.peek().kind in ("*", "/"):
            op = self.next()
            node = BinOp(op.kind, node, self.unary(), op.pos)
        return node

    def unary(self):
        if self.at("-"):
            tok = self.next()
            return Neg(self.unary(), tok.pos)
        if self.at("+"):
            self.next()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.at("^"):
            tok = self.next()
            return BinOp("^", base, self.unary(), tok.pos)
        return base

    def atom(self):
        tok = self.peek()
        if tok.kind in ("INT", "NUM"):
            self.next()
            return Num(float(tok.text), tok.pos)
        if tok.kind == "IDENT":
            self.next()
            if tok.text in FUNCTIONS:
                self.expect("(", f"'(' after {tok.text}")
                arg = self.expr()
                self.expect(")", "')'")
                return Call(tok.text, arg, tok.pos)
            if tok.text in KEYWORDS or tok.text in CALLS:
                raise _Fail(f"keyword {tok.text!r} used in an expression", tok.pos)
            if tok.text not in self.env and tok.text not in CONSTANTS:
                raise _Fail(f"unknown identifier {tok.text!r}", tok.pos)
            return Name(tok.text, tok.pos)
        if tok.kind == "(":
            self.next()
            node = self.expr()
            self.expect(")", "')'")
            return node
        if tok.kind == "CREATE":
            raise _Fail("creation operator inside an expression; coefficients must be parenthesised", tok.pos)
        raise _Fail(f"expected an expression, found {tok.text or tok.kind!r}", tok.pos)

    def value(self, node) -> complex:
        try:
            return eval_expr(node, self.env)
        except EvalError as exc:
            raise _Fail(str(exc), exc.pos) from None

    def qubit(self, tok: Token) -> int:
        k = int(tok.text)
        if k >= self.rank:
            raise _Fail(f"qubit index {k} >= register rank {self.rank}", tok.pos)
        return k

    def int_arg(self, what: str) -> int:
        return self.qubit(self.expect("INT", what))

    # terms
    def term(self, allow_ket: bool) -> _Term:
        start = self.peek().pos
        coeff = None
        if self.at("("):
            self.next()
            coeff = self.expr()
            self.expect(")", "')'")
        if allow_ket and self.at("KET"):
            return _Term(coeff, [], self.next(), start)
        qubits = []
        while self.at("CREATE"):
            tok = self.next()
            qubits.append((self.qubit(tok), tok.pos))
        if not qubits:
            what = "a creation operator A+k or a ket" if allow_ket else "a creation operator A+k"
            tok = self.peek()
            raise _Fail(f"expected {what}, found {tok.text or tok.kind!r}", tok.pos)
        return _Term(coeff, qubits, None, start)

    def term_sum(self, allow_ket: bool = False) -> list[_Term]:
        terms = [self.term(allow_ket)]
        while True:
            if self.at("+"):
                self.next()
            elif self.at("NEWLINE") and self._continues():
                self.skip_newlines()
                self.next()
            else:
                return terms
            self.skip_newlines()
            terms.append(self.term(allow_ket))

    def _continues(self) -> bool:
        j = self.i
        while self.tokens[j].kind == "NEWLINE":
            j += 1
        return self.tokens[j].kind == "+"

    def monomial_terms(self, terms: list[_Term]) -> list[tuple[complex, CreationMonomial]]:
        out = []
        for t in terms:
            c = 1 + 0j if t.coeff is None else self.value(t.coeff)
            ks = [k for k, _ in t.qubits]
            if len(set(ks)) != len(ks):
                dup = next(p for n, (k, p) in enumerate(t.qubits) if k in ks[:n])
                raise _Fail(f"repeated creation operator in monomial {' '.join(f'A+{k}' for k in ks)}", dup)
            out.append((c, CreationMonomial(ks)))
        return out

    # items
    def parse(self) -> Document:
        self.skip_newlines()
        try:
            if not self.at("IDENT", "register"):
                tok = self.peek()
                raise _Fail(f"expected 'register', found {tok.text or tok.kind!r}", tok.pos)
            self.next()
            tok = self.expect("INT", "register rank")
            self.rank = int(tok.text)
            if not 1 <= self.rank <= 63:
                raise _Fail(f"register rank must be in [1, 63], got {self.rank}", tok.pos)
            self.end_of_item()
        except _Fail as f:
            self.error(str(f), f.pos)
            raise DSLError(self.diags)

        initial: SparseState | None = None
        stages: list[Stage] = []
        detectors: dict[str, tuple[int, ...]] = {}
        seen_params: set[str] = set()
        self.skip_newlines()
        while not self.at("EOF"):
            tok = self.peek()
            try:
                if not (tok.kind == "IDENT" and tok.text in KEYWORDS - {"register"}):
                    raise _Fail(f"expected 'param', 'init', 'stage' or 'detect', found {tok.text or tok.kind!r}",
                                tok.pos)
                self.next()
                if tok.text == "param":
                    self.param_item(seen_params)
                elif tok.text == "init":
                    if initial is not None:
                        raise _Fail("duplicate 'init'", tok.pos)
                    initial = self.init_item()
                elif tok.text == "stage":
                    stage = self.stage_item(tok)
                    if stage is not None:
                        if any(s.name == stage.name for s in stages):
                            self.error(f"duplicate stage name {stage.name!r}", tok.pos)
                        else:
                            stages.append(stage)
                else:
                    name, qubits = self.detect_item()
                    if name in detectors:
                        raise _Fail(f"duplicate detector name {name!r}", tok.pos)
                    detectors[name] = qubits
                self.end_of_item()
            except _Fail as f:
                self.error(str(f), f.pos)
                self.sync_item()
            self.skip_newlines()

        unknown = sorted(set(self.overrides) - seen_params)
        for name in unknown:
            self.error(f"unknown parameter {name!r} in overrides", (0, 0))
        if self.diags:
            raise DSLError(self.diags)
        if initial is None:
            initial = SparseState.void(self.rank)
        try:
            program = ExperimentProgram(self.rank, initial, tuple(stages), detectors)
        except (ProgramError, RegisterError, RuleError) as exc:
            raise DSLError([Diagnostic(1, 1, str(exc))]) from None
        return Document(program, {k: v for k, v in self.env.items()})

    def end_of_item(self) -> None:
        if not (self.at("NEWLINE") or self.at("EOF")):
            tok = self.peek()
            raise _Fail(f"unexpected {tok.text!r} after item", tok.pos)

    def param_item(self, seen: set[str]) -> None:
        name = self.expect("IDENT", "parameter name")
        if name.text in RESERVED:
            raise _Fail(f"{name.text!r} is reserved and cannot name a parameter", name.pos)
        if name.text in seen:
            raise _Fail(f"duplicate parameter {name.text!r}", name.pos)
        self.expect("=", "'='")
        node = self.expr()
        seen.add(name.text)
        if name.text in self.overrides:
            self.env[name.text] = self.override_value(name)
        else:
            self.env[name.text] = self.value(node)

    def override_value(self, name: Token) -> complex:
        raw = self.overrides[name.text]
        if not isinstance(raw, str):
            return complex(raw)
        sub = _Parser(raw, {})
        sub.env = dict(self.env)
        try:
            node = sub.expr()
            if not sub.at("EOF"):
                raise _Fail(f"trailing input {sub.peek().text!r}", sub.peek().pos)
            return sub.value(node)
        except _Fail as f:
            raise _Fail(f"override {name.text}={raw!r}: {f}", name.pos) from None

    def init_item(self) -> SparseState:
        state = SparseState.zero(self.rank)
        for t in self.term_sum(allow_ket=True):
            c = 1 + 0j if t.coeff is None else self.value(t.coeff)
            if t.ket is not None:
                try:
                    a = parse_ket(t.ket.text, self.rank)
                except RegisterError as exc:
                    raise _Fail(str(exc), t.ket.pos) from None
                state = state + SparseState.basis(self.rank, a, c)
            else:
                (c, m), = self.monomial_terms([_Term(t.coeff, t.qubits, None, t.pos)])
                state = state + SparseState.basis(self.rank, m.mask, c)
        return state

    def detect_item(self) -> tuple[str, tuple[int, ...]]:
        name = self.expect("IDENT", "detector name")
        self.expect("=", "'='")
        qubits = [self.qubit(self.expect("INT", "qubit index"))]
        while self.at("INT"):
            tok = self.next()
            k = self.qubit(tok)
            if k in qubits:
                raise _Fail(f"qubit {k} listed twice in detector {name.text!r}", tok.pos)
            qubits.append(k)
        return name.text, tuple(qubits)

    def stage_item(self, kw: Token) -> Stage | None:
        name = self.expect("IDENT", "stage name")
        self.skip_newlines()
        self.expect("{", "'{'")
        rules: list[tuple[TransitionRule, tuple[int, int]]] = []
        errors_before = len(self.diags)
        while True:
            self.skip_newlines()
            if self.at("}"):
                self.next()
                break
            if self.at("EOF"):
                raise _Fail(f"unterminated stage {name.text!r}", kw.pos)
            start = self.peek()
            try:
                rules.extend((r, start.pos) for r in self.entry())
                if not (self.at("NEWLINE") or self.at("}")):
                    tok = self.peek()
                    raise _Fail(f"unexpected {tok.text or tok.kind!r} after stage entry", tok.pos)
            except _Fail as f:
                self.error(str(f), f.pos)
                while not (self.at("NEWLINE") or self.at("}") or self.at("EOF")):
                    self.next()
        if len(self.diags) > errors_before:
            return None
        seen: dict[int, tuple[int, int]] = {}
        for r, pos in rules:
            if r.source in seen:
                self.error(f"stage {name.text!r}: qubit {r.source} is the source of more than one rule", pos)
                return None
            seen[r.source] = pos
        for r, pos in rules:
            fed = sorted(r.target_qubits() & set(seen))
            if fed:
                self.error(f"stage {name.text!r}: rule for A+{r.source} targets qubit(s) {fed} "
                           "which are sources in the same stage", pos)
                return None
        return Stage(name.text, tuple(r for r, _ in rules))

    def entry(self) -> list[TransitionRule]:
        tok = self.peek()
        if tok.kind == "CREATE":
            self.next()
            src = self.qubit(tok)
            self.expect("ARROW", "'->'")
            self.skip_newlines()
            targets = self.monomial_terms(self.term_sum())
            try:
                return [TransitionRule(src, targets)]
            except (RuleError, RegisterError) as exc:
                raise _Fail(str(exc), tok.pos) from None
        if tok.kind == "IDENT" and tok.text in CALLS:
            self.next()
            self.expect("(", "'('")
            try:
                stage = getattr(self, f"call_{tok.text}")()
            except (RuleError, RegisterError) as exc:
                raise _Fail(str(exc), tok.pos) from None
            self.expect(")", "')'")
            return list(stage.rules)
        raise _Fail(f"expected a rule 'A+k -> ...' or one of {sorted(CALLS)}, found {tok.text or tok.kind!r}",
                    tok.pos)

    def call_pvm(self) -> Stage:
        src = self.int_arg("source qubit")
        self.expect(",", "','")
        outs, amps = [], []
        for c, m in self.monomial_terms(self.term_sum()):
            if len(m) != 1:
                raise RuleError(f"pvm outcomes must be single creation operators, got {m}")
            outs.append(m.indices[0])
            amps.append(c)
        return catalog.pvm_test(src, outs, amps)

    def call_pair(self) -> Stage:
        src = self.int_arg("source qubit")
        self.expect(",", "','")
        pairs = []
        for c, m in self.monomial_terms(self.term_sum()):
            if len(m) != 2:
                raise RuleError(f"pair targets must be two creation operators, got {m}")
            pairs.append((c, m.indices))
        return catalog.pair_source(src, pairs)

    def call_bs(self) -> Stage:
        ports = [self.int_arg("qubit index")]
        for _ in range(3):
            self.expect(",", "','")
            ports.append(self.int_arg("qubit index"))
        vals = []
        for _ in range(2):
            self.expect(",", "','")
            vals.append(self.value(self.expr()))
        eta = 0j
        if self.at(","):
            self.next()
            tok = self.peek()
            eta = self.value(self.expr())
            if eta.imag != 0:
                raise _Fail("beam splitter phase eta must be real", tok.pos)
        return catalog.beam_splitter(*ports, vals[0], vals[1], eta.real)

    def call_map(self) -> Stage:
        src = self.int_arg("source qubit")
        self.expect(",", "','")
        dst = self.int_arg("destination qubit")
        factor = 1 + 0j
        if self.at(","):
            self.next()
            factor = self.value(self.expr())
        return catalog.single_channel_map(src, dst, factor)


def parse_document(text: str, overrides: Mapping[str, complex | str] | None = None) -> Document:
    return _Parser(text, overrides or {}).parse()


def parse_experiment(text: str, overrides: Mapping[str, complex | str] | None = None) -> ExperimentProgram:
    """Parse and validate an experiment description.

    ``overrides`` replaces the values of declared ``param`` lines; values may
    be numbers or expression strings.  Raises :class:`DSLError` listing every
    diagnostic found.
    """
    return parse_document(text, overrides).program


def parse_expr(text: str, env: Mapping[str, complex] | None = None):
    """Parse a standalone expression; identifiers must be bound in ``env`` or be constants."""
    p = _Parser(text, {})
    p.env = dict(env or {})
    try:
        node = p.expr()
        if not p.at("EOF"):
            raise _Fail(f"unexpected {p.peek().text!r}", p.peek().pos)
    except _Fail as f:
        raise DSLError([Diagnostic(f.pos[0], f.pos[1], str(f))]) from None
    return node


# -- printing -----------------------------------------------------------------

def format_complex(c: complex) -> str:
    """Coefficient text that re-parses to exactly ``c``."""
    c = complex(c)
    if c.imag == 0:
        return f"({c.real!r})"
    return f"({c.real!r} + {c.imag!r}*i)"


def _format_terms(terms) -> str:
    return " + ".join(f"{format_complex(c)} {m}" for c, m in terms)


def format_program(program: ExperimentProgram) -> str:
    lines = [f"register {program.rank}"]
    init = program.initial.terms or {0: 0j}
    lines.append("init " + " + ".join(f"{format_complex(c)} |{a}_10)" for a, c in init.items()))
    for stage in program.stages:
        lines.append(f"stage {stage.name} {{")
        for r in stage.rules:
            lines.append(f"  A+{r.source} -> {_format_terms(r.targets)}")
        lines.append("}")
    for name, qubits in program.detectors.items():
        lines.append(f"detect {name} = {' '.join(str(k) for k in qubits)}")
    return "\n".join(lines) + "\n"
