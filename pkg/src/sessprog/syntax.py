"""Abstract syntax, parser and printer for a binary-session pi calculus
with priority-annotated session types.

Processes: idle, process variable, input, output, parallel composition,
session restriction (binds both endpoints), indexed recursion.  Session
types: end, type variable, priority-annotated input/output prefixes,
indexed recursion, plus a base sort for integer payloads.

Recursion indices are naturals or infinity; ``INF + 1 == INF`` and every
natural is below ``INF`` (we reuse ``math.inf``).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace

INF = math.inf

# An index is a natural number or INF; a priority is a natural number,
# a symbolic variable name, or INF (INF never appears in source text as
# a priority annotation, it only arises from obligation computation).
Index = float  # int | INF in practice
Priority = object  # int | str | INF


def index_str(i) -> str:
    return "inf" if i == INF else str(i)


def pri_str(p) -> str:
    if p == INF:
        return "inf"
    return str(p)


def co(polarity: str) -> str:
    """The polarity involution: co('+') == '-' and vice versa."""
    if polarity == "+":
        return "-"
    if polarity == "-":
        return "+"
    raise ValueError(f"not a polarity: {polarity!r}")


# ---------------------------------------------------------------------------
# Names and values


@dataclass(frozen=True)
class Var:
    ident: str


@dataclass(frozen=True)
class Endpoint:
    channel: str
    polarity: str

    @property
    def peer(self) -> "Endpoint":
        return Endpoint(self.channel, co(self.polarity))


Name = Var | Endpoint
# A value is a Name or an integer literal (base payloads only).
Value = object


def name_str(n) -> str:
    if isinstance(n, Var):
        return n.ident
    if isinstance(n, Endpoint):
        return n.channel + n.polarity
    return str(n)  # integer literal


# ---------------------------------------------------------------------------
# Session types


@dataclass(frozen=True)
class End:
    pass


@dataclass(frozen=True)
class TypeVar:
    ident: str


@dataclass(frozen=True)
class Base:
    kind: str = "int"


@dataclass(frozen=True)
class TIn:
    obl: Priority
    cap: Priority
    payload: "SessionType"
    cont: "SessionType"


@dataclass(frozen=True)
class TOut:
    obl: Priority
    cap: Priority
    payload: "SessionType"
    cont: "SessionType"


@dataclass(frozen=True)
class TRec:
    index: Index
    var: str
    body: "SessionType"


SessionType = End | TypeVar | Base | TIn | TOut | TRec


# ---------------------------------------------------------------------------
# Processes

Pos = tuple  # (line, col), informational only


@dataclass(frozen=True)
class Idle:
    pos: Pos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class ProcVar:
    ident: str
    pos: Pos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Input:
    subject: Name
    binder: str
    body: "Process"
    pos: Pos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Output:
    subject: Name
    payload: Value
    body: "Process"
    pos: Pos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Par:
    left: "Process"
    right: "Process"
    pos: Pos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class New:
    channel: str
    pos_type: SessionType | None
    neg_type: SessionType | None
    body: "Process"
    pos: Pos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Rec:
    index: Index
    var: str
    body: "Process"
    pos: Pos | None = field(default=None, compare=False, repr=False)


Process = Idle | ProcVar | Input | Output | Par | New | Rec


@dataclass(frozen=True)
class Program:
    process: Process
    type_aliases: dict = field(default_factory=dict, compare=False)


# ---------------------------------------------------------------------------
# Free names / variables


def free_names(p: Process) -> frozenset:
    """Free names of a process.

    Input binds its variable, ``new a`` binds both endpoints a+ and a-,
    recursion binds a process variable only (never names).
    """
    if isinstance(p, (Idle, ProcVar)):
        return frozenset()
    if isinstance(p, Input):
        sub = frozenset() if isinstance(p.subject, int) else frozenset([p.subject])
        return sub | (free_names(p.body) - {Var(p.binder)})
    if isinstance(p, Output):
        s = set()
        if not isinstance(p.subject, int):
            s.add(p.subject)
        if not isinstance(p.payload, int):
            s.add(p.payload)
        return frozenset(s) | free_names(p.body)
    if isinstance(p, Par):
        return free_names(p.left) | free_names(p.right)
    if isinstance(p, New):
        bound = {Endpoint(p.channel, "+"), Endpoint(p.channel, "-")}
        return free_names(p.body) - bound
    if isinstance(p, Rec):
        return free_names(p.body)
    raise TypeError(p)


def free_proc_vars(p: Process) -> frozenset:
    if isinstance(p, Idle):
        return frozenset()
    if isinstance(p, ProcVar):
        return frozenset([p.ident])
    if isinstance(p, (Input, Output, New)):
        return free_proc_vars(p.body)
    if isinstance(p, Par):
        return free_proc_vars(p.left) | free_proc_vars(p.right)
    if isinstance(p, Rec):
        return free_proc_vars(p.body) - {p.var}
    raise TypeError(p)


def free_type_vars(t: SessionType) -> frozenset:
    if isinstance(t, (End, Base)):
        return frozenset()
    if isinstance(t, TypeVar):
        return frozenset([t.ident])
    if isinstance(t, (TIn, TOut)):
        return free_type_vars(t.payload) | free_type_vars(t.cont)
    if isinstance(t, TRec):
        return free_type_vars(t.body) - {t.var}
    raise TypeError(t)


# ---------------------------------------------------------------------------
# Substitutions


def subst_name(p: Process, target: str, repl) -> Process | None:
    """Capture-avoiding substitution of a name (or base literal) for the
    free occurrences of the variable ``target``.

    Returns None (Undefined) when ``repl`` is an endpoint that would be
    captured by a ``new`` binder; callers are expected to alpha-rename
    first.  Undefined is a value, not a fault.
    """

    def sub_val(v):
        if isinstance(v, Var) and v.ident == target:
            return repl
        return v

    if isinstance(p, (Idle, ProcVar)):
        return p
    if isinstance(p, Input):
        if p.binder == target:
            return p
        body = subst_name(p.body, target, repl)
        if body is None:
            return None
        return replace(p, subject=sub_val(p.subject), body=body)
    if isinstance(p, Output):
        body = subst_name(p.body, target, repl)
        if body is None:
            return None
        return replace(p, subject=sub_val(p.subject), payload=sub_val(p.payload), body=body)
    if isinstance(p, Par):
        left = subst_name(p.left, target, repl)
        right = subst_name(p.right, target, repl)
        if left is None or right is None:
            return None
        return replace(p, left=left, right=right)
    if isinstance(p, New):
        if Var(target) not in free_names(p.body):
            return p
        if isinstance(repl, Endpoint) and repl.channel == p.channel:
            return None  # (new c (c+!x.0))[c-/x] is undefined
        body = subst_name(p.body, target, repl)
        if body is None:
            return None
        return replace(p, body=body)
    if isinstance(p, Rec):
        body = subst_name(p.body, target, repl)
        if body is None:
            return None
        return replace(p, body=body)
    raise TypeError(p)


def subst_proc(p: Process, target: str, q: Process) -> Process | None:
    """Capture-avoiding substitution of process ``q`` for the free
    occurrences of process variable ``target`` in ``p``.

    None (Undefined) when a free endpoint, free variable or free process
    variable of ``q`` would be captured by a binder in ``p``.
    """
    if isinstance(p, Idle):
        return p
    if isinstance(p, ProcVar):
        return q if p.ident == target else p
    if isinstance(p, (Input, Output)):
        if target not in free_proc_vars(p.body):
            return p
        if isinstance(p, Input) and Var(p.binder) in free_names(q):
            return None
        body = subst_proc(p.body, target, q)
        if body is None:
            return None
        return replace(p, body=body)
    if isinstance(p, Par):
        left = subst_proc(p.left, target, q)
        right = subst_proc(p.right, target, q)
        if left is None or right is None:
            return None
        return replace(p, left=left, right=right)
    if isinstance(p, New):
        if target not in free_proc_vars(p.body):
            return p
        if any(isinstance(n, Endpoint) and n.channel == p.channel for n in free_names(q)):
            return None  # (new a X)[a+!b+.0/X] is undefined
        body = subst_proc(p.body, target, q)
        if body is None:
            return None
        return replace(p, body=body)
    if isinstance(p, Rec):
        if p.var == target or target not in free_proc_vars(p.body):
            return p
        if p.var in free_proc_vars(q):
            return None
        body = subst_proc(p.body, target, q)
        if body is None:
            return None
        return replace(p, body=body)
    raise TypeError(p)


def subst_type_var(t: SessionType, target: str, s: SessionType) -> SessionType:
    """Capture-avoiding substitution of type ``s`` for free occurrences of
    the type variable ``target``; shadowed binders are renamed on demand."""
    if isinstance(t, (End, Base)):
        return t
    if isinstance(t, TypeVar):
        return s if t.ident == target else t
    if isinstance(t, (TIn, TOut)):
        return replace(
            t,
            payload=subst_type_var(t.payload, target, s),
            cont=subst_type_var(t.cont, target, s),
        )
    if isinstance(t, TRec):
        if t.var == target:
            return t
        if t.var in free_type_vars(s) and target in free_type_vars(t.body):
            fresh = t.var
            taken = free_type_vars(s) | free_type_vars(t.body)
            k = 0
            while fresh in taken:
                k += 1
                fresh = f"{t.var}{k}"
            body = subst_type_var(t.body, t.var, TypeVar(fresh))
            return TRec(t.index, fresh, subst_type_var(body, target, s))
        return replace(t, body=subst_type_var(t.body, target, s))
    raise TypeError(t)


# ---------------------------------------------------------------------------
# Freshening

def _all_idents(p: Process, acc: set):
    if isinstance(p, Idle):
        return
    if isinstance(p, ProcVar):
        acc.add(p.ident)
        return
    if isinstance(p, Input):
        _ident_of(p.subject, acc)
        acc.add(p.binder)
        _all_idents(p.body, acc)
        return
    if isinstance(p, Output):
        _ident_of(p.subject, acc)
        _ident_of(p.payload, acc)
        _all_idents(p.body, acc)
        return
    if isinstance(p, Par):
        _all_idents(p.left, acc)
        _all_idents(p.right, acc)
        return
    if isinstance(p, New):
        acc.add(p.channel)
        _all_idents(p.body, acc)
        return
    if isinstance(p, Rec):
        acc.add(p.var)
        _all_idents(p.body, acc)
        return
    raise TypeError(p)


def _ident_of(v, acc: set):
    if isinstance(v, Var):
        acc.add(v.ident)
    elif isinstance(v, Endpoint):
        acc.add(v.channel)


def all_idents(p: Process) -> set:
    acc: set = set()
    _all_idents(p, acc)
    return acc


def freshen(p: Process, reserved=()) -> Process:
    """Rename binders so every binder in the result is unique and distinct
    from every free name.  Binders whose names are not reused keep them,
    so already-fresh terms come back unchanged."""
    seen = set(reserved)
    for n in free_names(p):
        _ident_of(n, seen)
    seen |= free_proc_vars(p)

    def pick(base):
        if base not in seen:
            seen.add(base)
            return base
        k = 0
        while True:
            k += 1
            cand = f"{base}_{k}"
            if cand not in seen:
                seen.add(cand)
                return cand

    def sub_val(v, venv, cenv):
        if isinstance(v, Var):
            return Var(venv.get(v.ident, v.ident))
        if isinstance(v, Endpoint):
            return Endpoint(cenv.get(v.channel, v.channel), v.polarity)
        return v

    def go(q, venv, cenv, penv):
        if isinstance(q, Idle):
            return q
        if isinstance(q, ProcVar):
            return replace(q, ident=penv.get(q.ident, q.ident))
        if isinstance(q, Input):
            x = pick(q.binder)
            return replace(
                q,
                subject=sub_val(q.subject, venv, cenv),
                binder=x,
                body=go(q.body, {**venv, q.binder: x}, cenv, penv),
            )
        if isinstance(q, Output):
            return replace(
                q,
                subject=sub_val(q.subject, venv, cenv),
                payload=sub_val(q.payload, venv, cenv),
                body=go(q.body, venv, cenv, penv),
            )
        if isinstance(q, Par):
            return replace(q, left=go(q.left, venv, cenv, penv), right=go(q.right, venv, cenv, penv))
        if isinstance(q, New):
            a = pick(q.channel)
            return replace(q, channel=a, body=go(q.body, venv, {**cenv, q.channel: a}, penv))
        if isinstance(q, Rec):
            x = pick(q.var)
            return replace(q, var=x, body=go(q.body, venv, cenv, {**penv, q.var: x}))
        raise TypeError(q)

    return go(p, {}, {}, {})


# ---------------------------------------------------------------------------
# Pretty-printing


def pretty(x) -> str:
    """Render a process or session type in the concrete grammar.

    parse(pretty(x)) is structurally equal to x.
    """
    if isinstance(x, (End, TypeVar, Base, TIn, TOut, TRec)):
        return pretty_type(x)
    return pretty_proc(x)


def pretty_proc(p: Process) -> str:
    if isinstance(p, Idle):
        return "0"
    if isinstance(p, ProcVar):
        return p.ident
    if isinstance(p, Input):
        return f"{name_str(p.subject)}?({p.binder}).{_body(p.body)}"
    if isinstance(p, Output):
        return f"{name_str(p.subject)}!{name_str(p.payload)}.{_body(p.body)}"
    if isinstance(p, Par):
        left = pretty_proc(p.left)
        if isinstance(p.left, Par):
            left = f"({left})"
        return f"{left} | {pretty_proc(p.right)}"
    if isinstance(p, New):
        ann = ""
        if p.pos_type is not None:
            ann = f" : {pretty_type(p.pos_type)}"
            if p.neg_type is not None:
                ann += f" ~ {pretty_type(p.neg_type)}"
        return f"new {p.channel}{ann}.{_body(p.body)}"
    if isinstance(p, Rec):
        return f"rec[{index_str(p.index)}] {p.var}.{_body(p.body)}"
    raise TypeError(p)


def _body(p: Process) -> str:
    s = pretty_proc(p)
    if isinstance(p, Par):
        return f"({s})"
    return s


def pretty_type(t: SessionType) -> str:
    if isinstance(t, End):
        return "end"
    if isinstance(t, Base):
        return t.kind
    if isinstance(t, TypeVar):
        return t.ident
    if isinstance(t, (TIn, TOut)):
        op = "?" if isinstance(t, TIn) else "!"
        pay = pretty_type(t.payload)
        if isinstance(t.payload, (TIn, TOut, TRec)):
            pay = f"({pay})"
        return f"{op}[{pri_str(t.obl)},{pri_str(t.cap)}] {pay} . {pretty_type(t.cont)}"
    if isinstance(t, TRec):
        return f"rec[{index_str(t.index)}] {t.var}. {pretty_type(t.body)}"
    raise TypeError(t)


# ---------------------------------------------------------------------------
# Lexer / parser


class ParseError(Exception):
    def __init__(self, message, line, col, expected=()):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col
        self.expected = tuple(expected)


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>\#[^\n]*)
  | (?P<num>\d+)
  | (?P<id>[A-Za-z][A-Za-z0-9_]*)
  | (?P<sym>[?!.|()\[\],:~+\-=])
    """,
    re.VERBOSE,
)

_KEYWORDS = {"new", "rec", "inf", "end", "int", "type"}


def _tokenize(text: str):
    tokens = []
    line, col = 1, 1
    i = 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if m is None:
            raise ParseError(f"unexpected character {text[i]!r}", line, col)
        lexeme = m.group(0)
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            if kind == "id" and lexeme in _KEYWORDS:
                kind = lexeme
            tokens.append((kind, lexeme, line, col))
        nl = lexeme.count("\n")
        if nl:
            line += nl
            col = len(lexeme) - lexeme.rfind("\n")
        else:
            col += len(lexeme)
        i = m.end()
    tokens.append(("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str, aliases=None):
        self.tokens = _tokenize(text)
        self.i = 0
        self.aliases = dict(aliases or {})

    # -- token helpers

    def peek(self, k=0):
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def next(self):
        tok = self.tokens[self.i]
        if tok[0] != "eof":
            self.i += 1
        return tok

    def accept(self, kind, value=None):
        tok = self.peek()
        if tok[0] == kind and (value is None or tok[1] == value):
            return self.next()
        return None

    def expect(self, kind, value=None, what=None):
        tok = self.accept(kind, value)
        if tok is None:
            got = self.peek()
            want = what or value or kind
            raise ParseError(
                f"expected {want!r}, found {got[1] or 'end of input'!r}",
                got[2], got[3], expected=(want,),
            )
        return tok

    def error(self, message, expected=()):
        tok = self.peek()
        raise ParseError(message, tok[2], tok[3], expected=expected)

    # -- programs

    def parse_program(self) -> Program:
        while self.peek()[0] == "type":
            self.next()
            name_tok = self.expect("id", what="alias name")
            name = name_tok[1]
            if not name[0].isupper():
                raise ParseError("type alias names start uppercase", name_tok[2], name_tok[3])
            if name in self.aliases:
                raise ParseError(f"duplicate type alias {name!r}", name_tok[2], name_tok[3])
            self.expect("sym", "=")
            self.aliases[name] = self.parse_type()
        proc = self.parse_proc()
        self.expect("eof", what="end of input")
        return Program(proc, self.aliases)

    # -- processes

    def parse_proc(self) -> Process:
        left = self.parse_prefix()
        if self.accept("sym", "|"):
            return Par(left, self.parse_proc(), pos=_pos(self.peek()))
        return left

    def _cont(self) -> Process:
        self.expect("sym", ".")
        return self.parse_prefix()

    def parse_prefix(self) -> Process:
        tok = self.peek()
        pos = _pos(tok)
        if self.accept("num", "0"):
            return Idle(pos=pos)
        if tok[0] == "sym" and tok[1] == "(":
            self.next()
            p = self.parse_proc()
            self.expect("sym", ")")
            return p
        if tok[0] == "new":
            self.next()
            chan = self._lower_id("channel")
            pos_type = neg_type = None
            if self.accept("sym", ":"):
                pos_type = self.parse_type()
                if self.accept("sym", "~"):
                    neg_type = self.parse_type()
            return New(chan, pos_type, neg_type, self._cont(), pos=pos)
        if tok[0] == "rec":
            self.next()
            idx = self._index()
            var = self._upper_id("process variable")
            return Rec(idx, var, self._cont(), pos=pos)
        if tok[0] == "id":
            if tok[1][0].isupper():
                self.next()
                return ProcVar(tok[1], pos=pos)
            subject = self._name()
            if self.accept("sym", "?"):
                self.expect("sym", "(")
                binder = self._lower_id("variable")
                self.expect("sym", ")")
                return Input(subject, binder, self._cont(), pos=pos)
            if self.accept("sym", "!"):
                payload = self._value()
                return Output(subject, payload, self._cont(), pos=pos)
            self.error("expected '?' or '!' after subject", expected=("?", "!"))
        if tok[0] == "num":
            self.error("only '0' denotes the idle process", expected=("0",))
        self.error("expected a process", expected=("process",))

    def _name(self):
        tok = self.expect("id", what="name")
        if not tok[1][0].islower():
            raise ParseError("names are lowercase identifiers", tok[2], tok[3])
        sign = self.peek()
        if sign[0] == "sym" and sign[1] in "+-":
            self.next()
            return Endpoint(tok[1], sign[1])
        return Var(tok[1])

    def _value(self):
        tok = self.peek()
        if tok[0] == "num":
            self.next()
            return int(tok[1])
        return self._name()

    def _index(self):
        self.expect("sym", "[")
        tok = self.peek()
        if tok[0] == "inf":
            self.next()
            idx = INF
        else:
            idx = int(self.expect("num", what="index")[1])
        self.expect("sym", "]")
        return idx

    def _lower_id(self, what):
        tok = self.expect("id", what=what)
        if not tok[1][0].islower():
            raise ParseError(f"{what} identifiers start lowercase", tok[2], tok[3])
        return tok[1]

    def _upper_id(self, what):
        tok = self.expect("id", what=what)
        if not tok[1][0].isupper():
            raise ParseError(f"{what} identifiers start uppercase", tok[2], tok[3])
        return tok[1]

    # -- session types

    def parse_type(self, bound=()) -> SessionType:
        bound = set(bound)
        tok = self.peek()
        if tok[0] == "end":
            self.next()
            return End()
        if tok[0] == "int":
            self.next()
            return Base()
        if tok[0] == "sym" and tok[1] == "(":
            self.next()
            t = self.parse_type(bound)
            self.expect("sym", ")")
            return t
        if tok[0] == "sym" and tok[1] in "?!":
            self.next()
            self.expect("sym", "[")
            obl = self._priority()
            self.expect("sym", ",")
            cap = self._priority()
            self.expect("sym", "]")
            payload = self.parse_type(bound)
            self.expect("sym", ".")
            cont = self.parse_type(bound)
            cls = TIn if tok[1] == "?" else TOut
            return cls(obl, cap, payload, cont)
        if tok[0] == "rec":
            self.next()
            idx = self._index()
            var = self._lower_id("type variable")
            self.expect("sym", ".")
            return TRec(idx, var, self.parse_type(bound | {var}))
        if tok[0] == "id":
            self.next()
            if tok[1][0].isupper():
                if tok[1] not in self.aliases:
                    raise ParseError(f"unknown type alias {tok[1]!r}", tok[2], tok[3])
                return self.aliases[tok[1]]
            return TypeVar(tok[1])
        self.error("expected a type", expected=("type",))

    def _priority(self):
        tok = self.peek()
        if tok[0] == "num":
            self.next()
            return int(tok[1])
        return self._lower_id("priority variable")


def _pos(tok):
    return (tok[2], tok[3])


def parse_program(text: str) -> Program:
    """Parse a program: optional ``type NAME = T`` alias lines, then a
    process.  Aliases are spliced at parse time, so the returned AST is
    alias-free."""
    return _Parser(text).parse_program()


def parse_process(text: str, aliases=None) -> Process:
    parser = _Parser(text, aliases)
    proc = parser.parse_proc()
    parser.expect("eof", what="end of input")
    return proc


def parse_type(text: str, aliases=None) -> SessionType:
    parser = _Parser(text, aliases)
    t = parser.parse_type()
    parser.expect("eof", what="end of input")
    return t
