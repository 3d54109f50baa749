"""Text syntax for programs and signal streams, and model output lines.

Programs are line-oriented and ASP-like::

    #ext a/1.
    #background value(0..30).
    #const n = 20.
    b(X) :- [2 t] <> a(X).
    @T high :- value(V), [n t] @T alpha(V), V >= 18.

Window atoms are written ``[size t]`` (time) or ``[size #]`` (tuple)
followed by ``<>``, ``[]`` or ``@T``.  ``%`` starts a comment.
"""
from __future__ import annotations

import re
from typing import NamedTuple

from .model import (
    BOX,
    DIAMOND,
    At,
    AtTime,
    Atom,
    Comparison,
    LarsProgram,
    LarsRule,
    Plain,
    Var,
    Window,
    WindowSpec,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        self.message, self.line, self.column = message, line, column
        super().__init__(f"line {line}, column {column}: {message}")


_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|%[^\n]*)
  | (?P<directive>\#[a-z]+)
  | (?P<op>:-|\.\.|<>|<=|>=|!=|<|>|=)
  | (?P<int>-?\d+)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<ident>[a-z][A-Za-z0-9_]*)
  | (?P<string>"[^"\n]*")
  | (?P<punct>[()\[\],.@/\#])
    """,
    re.VERBOSE,
)

COMPARISONS = ("<", "<=", ">", ">=", "=", "!=")


class _Tok(NamedTuple):
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list:
    out = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind != "ws":
            out.append(_Tok(kind, m.group(), line, pos - line_start + 1))
        chunk = m.group()
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    out.append(_Tok("eof", "", line, pos - line_start + 1))
    return out


class _Parser:
    def __init__(self, text: str, consts=None):
        self.toks = _tokenize(text)
        self.i = 0
        self.consts = dict(consts or {})

    # -- helpers ----------------------------------------------------------------

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k=1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        return ParseError(msg, tok.line, tok.col)

    def at(self, text) -> bool:
        return self.tok.text == text and self.tok.kind in ("op", "punct", "ident", "directive")

    def expect(self, text) -> _Tok:
        if not self.at(text):
            shown = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {shown!r}")
        t = self.tok
        self.i += 1
        return t

    # -- terms and atoms ----------------------------------------------------------

    def term(self):
        t = self.tok
        if t.kind == "int":
            self.i += 1
            return int(t.text)
        if t.kind == "var":
            self.i += 1
            return Var(t.text)
        if t.kind == "ident":
            self.i += 1
            return t.text
        if t.kind == "string":
            self.i += 1
            return t.text[1:-1]
        raise self.error(f"expected a term, found {t.text or 'end of input'!r}")

    def atom(self) -> Atom:
        t = self.tok
        if t.kind != "ident":
            raise self.error(f"expected a predicate name, found {t.text or 'end of input'!r}")
        self.i += 1
        args = []
        if self.at("("):
            self.i += 1
            args.append(self.term())
            while self.at(","):
                self.i += 1
                args.append(self.term())
            self.expect(")")
        return Atom(t.text, tuple(args))

    def fact_atoms(self) -> list:
        """A background atom; ``lo..hi`` arguments expand to ranges."""
        t = self.tok
        if t.kind != "ident":
            raise self.error("expected a predicate name")
        self.i += 1
        choices = []
        if self.at("("):
            self.i += 1
            while True:
                x = self.term()
                if self.at(".."):
                    self.i += 1
                    y = self.term()
                    if not (isinstance(x, int) and isinstance(y, int)):
                        raise self.error("range bounds must be integers")
                    choices.append(list(range(x, y + 1)))
                else:
                    choices.append([x])
                if not self.at(","):
                    break
                self.i += 1
            self.expect(")")
        out = [()]
        for ch in choices:
            out = [a + (v,) for a in out for v in ch]
        for args in out:
            if any(isinstance(v, Var) for v in args):
                raise self.error("background facts must be ground", t)
        return [Atom(t.text, args) for args in out]

    # -- extended atoms -------------------------------------------------------------

    def size(self) -> int:
        t = self.tok
        if t.kind == "int":
            self.i += 1
            return int(t.text)
        if t.kind == "ident" and t.text in self.consts:
            self.i += 1
            return int(self.consts[t.text])
        raise self.error(f"expected a window size, found {t.text or 'end of input'!r}")

    def extended(self):
        if self.at("@"):
            self.i += 1
            tm = self.term()
            return At(tm, self.atom())
        if self.at("["):
            start = self.tok
            self.i += 1
            n = self.size()
            if self.at("t"):
                kind = "time"
            elif self.at("#"):
                kind = "tuple"
            else:
                raise self.error("expected 't' or '#' after the window size")
            self.i += 1
            self.expect("]")
            if self.at("<>"):
                self.i += 1
                mod = DIAMOND
            elif self.at("[") and self.peek().text == "]":
                self.i += 2
                mod = BOX
            elif self.at("@"):
                self.i += 1
                mod = AtTime(self.term())
            else:
                raise self.error("expected '<>', '[]' or '@T' after a window")
            try:
                spec = WindowSpec(kind, n)
            except ValueError as exc:
                raise self.error(str(exc), start) from None
            return Window(spec, mod, self.atom())
        return Plain(self.atom())

    def literal(self):
        """(negated, extended atom) or a comparison."""
        t = self.tok
        if t.kind in ("var", "int", "string") or (t.kind == "ident" and self.peek().text in COMPARISONS):
            left = self.term()
            op = self.tok
            if op.text not in COMPARISONS:
                raise self.error(f"expected a comparison operator, found {op.text or 'end of input'!r}")
            self.i += 1
            return Comparison(op.text, left, self.term())
        if t.kind == "ident" and t.text == "not" and self.peek().text not in ("(", ",", ".", ":-"):
            self.i += 1
            return (True, self.extended())
        return (False, self.extended())

    # -- statements -------------------------------------------------------------------

    def program(self, extensional=None) -> LarsProgram:
        rules, background, ext = [], [], []
        while self.tok.kind != "eof":
            t = self.tok
            if t.kind == "directive":
                self.i += 1
                if t.text == "#ext":
                    while True:
                        name = self.tok
                        if name.kind != "ident":
                            raise self.error("expected a predicate name")
                        self.i += 1
                        if self.at("/"):
                            self.i += 1
                            if self.tok.kind != "int":
                                raise self.error("expected an arity")
                            self.i += 1
                        ext.append(name.text)
                        if not self.at(","):
                            break
                        self.i += 1
                elif t.text == "#background":
                    background.extend(self.fact_atoms())
                    while self.at(","):
                        self.i += 1
                        background.extend(self.fact_atoms())
                elif t.text == "#const":
                    name = self.tok
                    if name.kind != "ident":
                        raise self.error("expected a constant name")
                    self.i += 1
                    self.expect("=")
                    if self.tok.kind != "int":
                        raise self.error("expected an integer")
                    self.consts.setdefault(name.text, int(self.tok.text))
                    self.i += 1
                else:
                    raise self.error(f"unknown directive {t.text}", t)
                self.expect(".")
                continue
            rules.append(self.rule())
        if extensional is not None:
            ext.extend(extensional)
        elif not ext:
            heads = {r.head.atom.pred for r in rules}
            bg = {a.pred for a in background}
            ext = [e.atom.pred for r in rules for e in r.body() if e.atom.pred not in heads | bg]
        return LarsProgram(tuple(rules), frozenset(background), frozenset(ext))

    def rule(self) -> LarsRule:
        start = self.tok
        if self.at("@"):
            self.i += 1
            tm = self.term()
            head = At(tm, self.atom())
        else:
            head = Plain(self.atom())
        pos, neg, guards = [], [], []
        if self.at(":-"):
            self.i += 1
            while True:
                lit = self.literal()
                if isinstance(lit, Comparison):
                    guards.append(lit)
                elif lit[0]:
                    neg.append(lit[1])
                else:
                    pos.append(lit[1])
                if not self.at(","):
                    break
                self.i += 1
        self.expect(".")
        r = LarsRule(head, tuple(pos), tuple(neg), tuple(guards))
        _check_safety(r, start)
        return r


def _check_safety(r: LarsRule, tok: _Tok) -> None:
    from .model import ext_variables

    bound = set()
    for e in r.pos:
        bound |= ext_variables(e)
    for g in r.guards:
        # X = c binds X
        if g.op == "=":
            if isinstance(g.left, Var) and not isinstance(g.right, Var):
                bound.add(g.left)
            if isinstance(g.right, Var) and not isinstance(g.left, Var):
                bound.add(g.right)
    free = r.variables() - bound
    if free:
        names = ", ".join(sorted(v.name for v in free))
        raise ParseError(f"unsafe variable(s) {names} in rule {r}", tok.line, tok.col)


def parse_program(text: str, consts=None, extensional=None) -> LarsProgram:
    """Parse program text.

    Without ``#ext`` directives, body predicates that are neither rule
    heads nor background predicates are taken as extensional.
    """
    return _Parser(text, consts).program(extensional)


def parse_rule(text: str, consts=None) -> LarsRule:
    p = _Parser(text, consts)
    r = p.rule()
    if p.tok.kind != "eof":
        raise p.error("unexpected text after rule")
    return r


def parse_atom(text: str) -> Atom:
    p = _Parser(text)
    a = p.atom()
    if p.tok.kind != "eof":
        raise p.error("unexpected text after atom")
    return a


class SignalEvent(NamedTuple):
    time: int
    atom: Atom


def parse_signal(line: str, extensional=None) -> SignalEvent:
    """``<time> <atom>``, e.g. ``5 alpha(17)``."""
    p = _Parser(line)
    t = p.tok
    if t.kind != "int" or int(t.text) < 0:
        raise p.error("expected a nonnegative time")
    p.i += 1
    a = p.atom()
    if p.tok.kind != "eof":
        raise p.error("unexpected text after signal")
    if not a.is_ground():
        raise ParseError(f"signal {a} is not ground", t.line, t.col)
    if extensional is not None and a.pred not in extensional:
        raise ParseError(f"predicate {a.pred} is not extensional", t.line, t.col)
    return SignalEvent(int(t.text), a)


def parse_signals(text: str, extensional=None) -> list:
    """All signal lines of ``text``; blank and ``%`` lines are skipped."""
    out = []
    last = 0
    for n, line in enumerate(text.splitlines(), 1):
        s = line.split("%", 1)[0].strip()
        if not s:
            continue
        try:
            ev = parse_signal(s, extensional)
        except ParseError as exc:
            raise ParseError(exc.message, n, exc.column) from None
        if ev.time < last:
            raise ParseError(f"time {ev.time} precedes {last}", n, 1)
        last = ev.time
        out.append(ev)
    return out


def format_rule(r: LarsRule) -> str:
    return str(r)


def format_program(p: LarsProgram) -> str:
    lines = []
    if p.extensional:
        lines.append("#ext " + ", ".join(sorted(p.extensional)) + ".")
    for a in sorted(p.background, key=str):
        lines.append(f"#background {a}.")
    lines.extend(format_rule(r) for r in p.rules)
    return "\n".join(lines)


def format_model(time: int, model, unknown: bool = False) -> str:
    """``@t model: ...`` with atoms sorted; ``None`` means no model."""
    if unknown:
        return f"@{time} unknown"
    if model is None:
        return f"@{time} no-model"
    atoms = sorted(str(a) for a in model)
    return f"@{time} model:" + "".join(" " + a for a in atoms)
