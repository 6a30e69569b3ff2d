"""Abstract syntax, expression evaluation, parsing, and printing for IL.

IL is a first-order language with tail calls, mutually recursive
function groups, and system calls.  Values are signed 64-bit integers
with two's-complement wrapping; comparisons yield 1 or 0.  Expression
evaluation returns None (undefined) when a needed variable is unbound
or a division by zero occurs.

Concrete grammar (whitespace-insensitive)::

    program  := term
    term     := "let" VAR "=" extexp "in" term
              | "if" expr "then" term "else" term
              | "fun" fundef { "and" fundef } "in" term
              | FUN "(" [expr {"," expr}] ")"
              | expr
    fundef   := FUN "(" [VAR {"," VAR}] ")" "=" term
    extexp   := expr | "extern" ACTION "(" [expr {"," expr}] ")"
    expr     := INT | VAR | "-" expr | "!" expr | "(" expr ")"
              | expr ("*"|"/") expr | expr ("+"|"-") expr
              | expr ("="|"<"|"<=") expr
    VAR/FUN/ACTION := [a-zA-Z_][a-zA-Z0-9_']*

Annotated terms mirror the term structure and carry one analysis fact
per node; a function-definition node orders its children as the
function bodies followed by the continuation.  The sidecar format is
one fact per line in pre-order: "true"/"false" for booleans, "{x,y}"
for variable sets.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Any, Iterator, Mapping, Optional, Sequence, Union

# ---------------------------------------------------------------------------
# Values

INT_MIN = -(1 << 63)
INT_MAX = (1 << 63) - 1
_MASK = (1 << 64) - 1


def wrap(v: int) -> int:
    """Reduce v to the signed 64-bit range with two's-complement wrapping."""
    v &= _MASK
    return v - (1 << 64) if v > INT_MAX else v


def truthy(v: int) -> bool:
    """Branch decision for conditionals: nonzero is true."""
    return v != 0


# ---------------------------------------------------------------------------
# Expressions


class Expr:
    """Base class for pure expressions."""

    __slots__ = ()


@dataclass(frozen=True)
class Const(Expr):
    value: int


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Unop(Expr):
    op: str  # 'neg' | 'not'
    arg: Expr


@dataclass(frozen=True)
class Binop(Expr):
    op: str  # '+' '-' '*' '/' '=' '<' '<='
    left: Expr
    right: Expr


def free_vars(e: Expr) -> frozenset[str]:
    if isinstance(e, Var):
        return frozenset((e.name,))
    if isinstance(e, Unop):
        return free_vars(e.arg)
    if isinstance(e, Binop):
        return free_vars(e.left) | free_vars(e.right)
    return frozenset()


def free_vars_list(es: Sequence[Expr]) -> frozenset[str]:
    out: frozenset[str] = frozenset()
    for e in es:
        out |= free_vars(e)
    return out


def _div(a: int, b: int) -> Optional[int]:
    # Truncating division; division by zero is undefined.
    if b == 0:
        return None
    q = abs(a) // abs(b)
    if (a < 0) != (b < 0):
        q = -q
    return wrap(q)


def eval_expr(e: Expr, env: Mapping[str, int]) -> Optional[int]:
    """Evaluate e under env; None means undefined (unbound var, div by 0)."""
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return env.get(e.name)
    if isinstance(e, Unop):
        v = eval_expr(e.arg, env)
        if v is None:
            return None
        return wrap(-v) if e.op == "neg" else (0 if v else 1)
    assert isinstance(e, Binop)
    a = eval_expr(e.left, env)
    if a is None:
        return None
    b = eval_expr(e.right, env)
    if b is None:
        return None
    op = e.op
    if op == "+":
        return wrap(a + b)
    if op == "-":
        return wrap(a - b)
    if op == "*":
        return wrap(a * b)
    if op == "/":
        return _div(a, b)
    if op == "=":
        return 1 if a == b else 0
    if op == "<":
        return 1 if a < b else 0
    if op == "<=":
        return 1 if a <= b else 0
    raise ValueError(f"unknown operator {op!r}")


def eval_expr_list(es: Sequence[Expr], env: Mapping[str, int]) -> Optional[tuple[int, ...]]:
    """Strict list evaluation: undefined as soon as any element is."""
    out = []
    for e in es:
        v = eval_expr(e, env)
        if v is None:
            return None
        out.append(v)
    return tuple(out)


# ---------------------------------------------------------------------------
# Terms


class Term:
    """Base class for IL terms."""

    __slots__ = ()


@dataclass(frozen=True)
class SysCall:
    """The right-hand side of a system-call let: action name and arguments."""

    action: str
    args: tuple[Expr, ...]


@dataclass(frozen=True)
class Exp(Term):
    expr: Expr


@dataclass(frozen=True)
class Let(Term):
    var: str
    value: Union[Expr, SysCall]
    body: Term


@dataclass(frozen=True)
class Cond(Term):
    cond: Expr
    then: Term
    orelse: Term


@dataclass(frozen=True)
class FunDef:
    """One definition inside a function group. Parameter names are distinct."""

    name: str
    params: tuple[str, ...]
    body: Term


@dataclass(frozen=True)
class Fun(Term):
    """A group of mutually recursive definitions with distinct names."""

    defs: tuple[FunDef, ...]
    cont: Term


@dataclass(frozen=True)
class App(Term):
    fun: str
    args: tuple[Expr, ...]


def term_children(t: Term) -> tuple[Term, ...]:
    """Subterms in canonical order (fundef: bodies, then continuation)."""
    if isinstance(t, Let):
        return (t.body,)
    if isinstance(t, Cond):
        return (t.then, t.orelse)
    if isinstance(t, Fun):
        return tuple(d.body for d in t.defs) + (t.cont,)
    return ()


def term_size(t: Term) -> int:
    return 1 + sum(term_size(c) for c in term_children(t))


def well_formed(t: Term) -> bool:
    """Structural invariants: distinct group names, distinct parameters."""
    if isinstance(t, Fun):
        names = [d.name for d in t.defs]
        if len(set(names)) != len(names):
            return False
        for d in t.defs:
            if len(set(d.params)) != len(d.params):
                return False
    return all(well_formed(c) for c in term_children(t))


def term_exprs(t: Term) -> tuple[Expr, ...]:
    """The expressions sitting directly at this node."""
    if isinstance(t, Let):
        return tuple(t.value.args) if isinstance(t.value, SysCall) else (t.value,)
    if isinstance(t, Cond):
        return (t.cond,)
    if isinstance(t, Exp):
        return (t.expr,)
    if isinstance(t, App):
        return tuple(t.args)
    return ()


def free_term_vars(t: Term) -> frozenset[str]:
    """Variables a whole program reads from its initial environment."""
    if isinstance(t, Let):
        return free_vars_list(term_exprs(t)) | (free_term_vars(t.body) - {t.var})
    if isinstance(t, Cond):
        return free_vars(t.cond) | free_term_vars(t.then) | free_term_vars(t.orelse)
    if isinstance(t, Fun):
        out = free_term_vars(t.cont)
        for d in t.defs:
            out |= free_term_vars(d.body) - set(d.params)
        return out
    return free_vars_list(term_exprs(t))


def constants_of(*terms: Term) -> frozenset[int]:
    out: set[int] = set()

    def expr_walk(e: Expr) -> None:
        if isinstance(e, Const):
            out.add(e.value)
        elif isinstance(e, Unop):
            expr_walk(e.arg)
        elif isinstance(e, Binop):
            expr_walk(e.left)
            expr_walk(e.right)

    def walk(t: Term) -> None:
        for e in term_exprs(t):
            expr_walk(e)
        for c in term_children(t):
            walk(c)

    for t in terms:
        walk(t)
    return frozenset(out)


# ---------------------------------------------------------------------------
# Annotated terms

FactTree = tuple  # (fact, (child FactTree, ...))


@dataclass(frozen=True)
class Annotated:
    """A term zipped with one fact per node.

    children follow term_children order; the invariant children[i].term
    is term_children(term)[i] makes strip a field access.
    """

    term: Term
    fact: Any
    children: tuple["Annotated", ...]


def strip(at: Annotated) -> Term:
    return at.term


def zip_ann(t: Term, facts: FactTree) -> Annotated:
    """Attach a structurally isomorphic fact tree to t."""
    if not (isinstance(facts, tuple) and len(facts) == 2 and isinstance(facts[1], tuple)):
        raise ValueError("fact tree nodes must be (fact, children) pairs")
    fact, subfacts = facts
    kids = term_children(t)
    if len(kids) != len(subfacts):
        raise ValueError(
            f"fact tree shape mismatch: node has {len(kids)} subterms, got {len(subfacts)} fact subtrees"
        )
    return Annotated(t, fact, tuple(zip_ann(c, f) for c, f in zip(kids, subfacts)))


def ann_walk(at: Annotated) -> Iterator[Annotated]:
    """Pre-order iteration over annotated nodes."""
    yield at
    for c in at.children:
        yield from ann_walk(c)


def _fact_line(fact: Any) -> str:
    if fact is True:
        return "true"
    if fact is False:
        return "false"
    return "{" + ",".join(sorted(fact)) + "}"


def _parse_fact_line(line: str, lineno: int) -> Any:
    line = line.strip()
    if line == "true":
        return True
    if line == "false":
        return False
    if line.startswith("{") and line.endswith("}"):
        inner = line[1:-1].strip()
        if not inner:
            return frozenset()
        return frozenset(p.strip() for p in inner.split(","))
    raise ValueError(f"sidecar line {lineno}: cannot parse fact {line!r}")


def sidecar_text(at: Annotated) -> str:
    """One fact per line, nodes in pre-order."""
    return "\n".join(_fact_line(n.fact) for n in ann_walk(at)) + "\n"


def parse_sidecar(t: Term, text: str) -> Annotated:
    """Rebuild an annotated term from a program and its sidecar."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    facts = [_parse_fact_line(ln, i + 1) for i, ln in enumerate(lines)]
    pos = 0

    def build(term: Term) -> Annotated:
        nonlocal pos
        if pos >= len(facts):
            raise ValueError("sidecar has fewer facts than the program has nodes")
        fact = facts[pos]
        pos += 1
        return Annotated(term, fact, tuple(build(c) for c in term_children(term)))

    out = build(t)
    if pos != len(facts):
        raise ValueError("sidecar has more facts than the program has nodes")
    return out


# ---------------------------------------------------------------------------
# Parsing


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


_KEYWORDS = frozenset({"let", "in", "if", "then", "else", "fun", "and", "extern"})

_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
      | (?P<int>[0-9]+)
      | (?P<sym><=|[=+*/<!(),-])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # 'ident' | 'int' | 'sym' | 'eof'
    text: str
    line: int
    col: int


def _tokenize(src: str) -> list[_Token]:
    tokens = []
    line, col, pos = 1, 1, 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", line, col)
        text = m.group(0)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, text, line, col))
        nl = text.count("\n")
        if nl:
            line += nl
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        pos = m.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


_BIN_PREC = {"=": 1, "<": 1, "<=": 1, "+": 2, "-": 2, "*": 3, "/": 3}


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self, ahead: int = 0) -> _Token:
        i = min(self.pos + ahead, len(self.tokens) - 1)
        return self.tokens[i]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def error(self, message: str, tok: Optional[_Token] = None) -> "ParseError":
        tok = tok or self.peek()
        return ParseError(message, tok.line, tok.col)

    def at_kw(self, kw: str) -> bool:
        tok = self.peek()
        return tok.kind == "ident" and tok.text == kw

    def expect_kw(self, kw: str) -> None:
        if not self.at_kw(kw):
            raise self.error(f"expected {kw!r}")
        self.advance()

    def expect_sym(self, sym: str) -> None:
        tok = self.peek()
        if tok.kind != "sym" or tok.text != sym:
            raise self.error(f"expected {sym!r}")
        self.advance()

    def expect_name(self, what: str) -> _Token:
        tok = self.peek()
        if tok.kind != "ident" or tok.text in _KEYWORDS:
            raise self.error(f"expected {what}")
        return self.advance()

    # -- terms

    def term(self) -> Term:
        tok = self.peek()
        if tok.kind == "ident":
            if tok.text == "let":
                return self.let_term()
            if tok.text == "if":
                return self.cond_term()
            if tok.text == "fun":
                return self.fun_term()
            nxt = self.peek(1)
            if tok.text not in _KEYWORDS and nxt.kind == "sym" and nxt.text == "(":
                return self.app_term()
        return Exp(self.expr())

    def let_term(self) -> Term:
        self.expect_kw("let")
        var = self.expect_name("a variable name").text
        self.expect_sym("=")
        value: Union[Expr, SysCall]
        if self.at_kw("extern"):
            self.advance()
            action = self.expect_name("an action name").text
            value = SysCall(action, self.expr_args())
        else:
            value = self.expr()
        self.expect_kw("in")
        return Let(var, value, self.term())

    def cond_term(self) -> Term:
        self.expect_kw("if")
        cond = self.expr()
        self.expect_kw("then")
        then = self.term()
        self.expect_kw("else")
        return Cond(cond, then, self.term())

    def fun_term(self) -> Term:
        self.expect_kw("fun")
        defs = [self.fundef()]
        while self.at_kw("and"):
            self.advance()
            defs.append(self.fundef())
        seen: set[str] = set()
        for d in defs:
            if d.name in seen:
                raise self.error(f"duplicate function name {d.name!r} in group")
            seen.add(d.name)
        self.expect_kw("in")
        return Fun(tuple(defs), self.term())

    def fundef(self) -> FunDef:
        name = self.expect_name("a function name").text
        self.expect_sym("(")
        params: list[str] = []
        if not (self.peek().kind == "sym" and self.peek().text == ")"):
            while True:
                ptok = self.expect_name("a parameter name")
                if ptok.text in params:
                    raise self.error(f"duplicate parameter {ptok.text!r}", ptok)
                params.append(ptok.text)
                if self.peek().kind == "sym" and self.peek().text == ",":
                    self.advance()
                    continue
                break
        self.expect_sym(")")
        self.expect_sym("=")
        return FunDef(name, tuple(params), self.term())

    def app_term(self) -> Term:
        name = self.expect_name("a function name").text
        return App(name, self.expr_args())

    def expr_args(self) -> tuple[Expr, ...]:
        self.expect_sym("(")
        args: list[Expr] = []
        if not (self.peek().kind == "sym" and self.peek().text == ")"):
            while True:
                args.append(self.expr())
                if self.peek().kind == "sym" and self.peek().text == ",":
                    self.advance()
                    continue
                break
        self.expect_sym(")")
        return tuple(args)

    # -- expressions (precedence climbing, all binops left-associative)

    def expr(self) -> Expr:
        return self.binop_chain(1)

    def binop_chain(self, prec: int) -> Expr:
        if prec > 3:
            return self.unary()
        e = self.binop_chain(prec + 1)
        while True:
            tok = self.peek()
            if tok.kind == "sym" and _BIN_PREC.get(tok.text) == prec:
                self.advance()
                e = Binop(tok.text, e, self.binop_chain(prec + 1))
            else:
                return e

    def unary(self) -> Expr:
        tok = self.peek()
        if tok.kind == "sym" and tok.text == "-":
            self.advance()
            nxt = self.peek()
            if nxt.kind == "int":
                self.advance()
                return Const(wrap(-int(nxt.text)))
            return Unop("neg", self.unary())
        if tok.kind == "sym" and tok.text == "!":
            self.advance()
            return Unop("not", self.unary())
        return self.atom()

    def atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "int":
            self.advance()
            return Const(wrap(int(tok.text)))
        if tok.kind == "ident" and tok.text not in _KEYWORDS:
            self.advance()
            return Var(tok.text)
        if tok.kind == "sym" and tok.text == "(":
            self.advance()
            e = self.expr()
            self.expect_sym(")")
            return e
        raise self.error("expected an expression")


def parse_program(src: str) -> Term:
    """Parse a program; raises ParseError with line/column on failure."""
    p = _Parser(_tokenize(src))
    t = p.term()
    if p.peek().kind != "eof":
        raise p.error("expected end of input")
    return t


# ---------------------------------------------------------------------------
# Printing


def _expr_str(e: Expr, min_prec: int = 0) -> str:
    if isinstance(e, Const):
        return str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Unop):
        if e.op == "neg":
            # -5 would re-parse as a literal; parenthesize constant operands
            if isinstance(e.arg, Const) and e.arg.value >= 0:
                return f"-({e.arg.value})"
            return "-" + _expr_str(e.arg, 4)
        return "!" + _expr_str(e.arg, 4)
    assert isinstance(e, Binop)
    p = _BIN_PREC[e.op]
    s = f"{_expr_str(e.left, p)} {e.op} {_expr_str(e.right, p + 1)}"
    return f"({s})" if p < min_prec else s


def _ext_str(value: Union[Expr, SysCall]) -> str:
    if isinstance(value, SysCall):
        return f"extern {value.action}({', '.join(_expr_str(a) for a in value.args)})"
    return _expr_str(value)


def _term_str(t: Term, ind: int) -> str:
    pad = " " * ind
    if isinstance(t, Exp):
        return _expr_str(t.expr)
    if isinstance(t, App):
        return f"{t.fun}({', '.join(_expr_str(a) for a in t.args)})"
    if isinstance(t, Let):
        return f"let {t.var} = {_ext_str(t.value)} in\n{pad}{_term_str(t.body, ind)}"
    if isinstance(t, Cond):
        s1 = _term_str(t.then, ind + 2)
        s2 = _term_str(t.orelse, ind + 2)
        cond = _expr_str(t.cond)
        inline = f"if {cond} then {s1} else {s2}"
        if "\n" not in inline and len(inline) + ind <= 72:
            return inline
        pad2 = " " * (ind + 2)
        return f"if {cond} then\n{pad2}{s1}\n{pad}else\n{pad2}{s2}"
    assert isinstance(t, Fun)
    pad2 = " " * (ind + 2)
    defs = []
    for d in t.defs:
        head = f"{d.name}({', '.join(d.params)}) ="
        defs.append(f"{head}\n{pad2}{_term_str(d.body, ind + 2)}")
    joined = f"\n{pad}and ".join(defs)
    return f"fun {joined}\n{pad}in\n{pad}{_term_str(t.cont, ind)}"


def print_program(t: Term) -> str:
    """Deterministic pretty-printer; parse_program inverts it exactly."""
    return _term_str(t, 0)
