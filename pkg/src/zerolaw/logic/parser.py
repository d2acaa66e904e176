"""Recursive-descent parser for the formula grammar.

    phi ::= E(v,v) | S(v,v) | v=v | !phi | (phi op phi) | exists v. phi | forall v. phi
    op  ::= & | "|" | ->

Redundant parentheses around a formula are accepted, and a parenthesised
chain of one operator, such as ``(a & b & c)``, associates to the left.
"""
from __future__ import annotations

import re

from .formula import ARITY, KEYWORDS, Atom, And, Eq, Exists, Forall, Implies, Not, Or

OPS = {"&": And, "|": Or, "->": Implies}
TOKEN_RE = re.compile(r"\s*(->|[A-Za-z][A-Za-z0-9_]*|[()!,.=&|]|\S)")


class FormulaSyntaxError(ValueError):
    def __init__(self, message, pos, line=None):
        self.pos = pos
        self.line = line
        where = f"line {line}, " if line is not None else ""
        super().__init__(f"{where}column {pos + 1}: {message}")


class ArityError(FormulaSyntaxError):
    pass


def _tokenize(text):
    toks = []
    i = 0
    while True:
        m = TOKEN_RE.match(text, i)
        if not m:
            break
        toks.append((m.group(1), m.start(1)))
        i = m.end()
    toks.append(("", len(text)))
    return toks


class _Parser:
    def __init__(self, text, line=None):
        self.toks = _tokenize(text)
        self.i = 0
        self.line = line

    def peek(self):
        return self.toks[self.i][0]

    def pos(self):
        return self.toks[self.i][1]

    def error(self, msg, cls=FormulaSyntaxError, pos=None):
        raise cls(msg, self.pos() if pos is None else pos, self.line)

    def take(self, expected=None):
        tok = self.peek()
        if expected is not None and tok != expected:
            self.error(f"expected {expected!r}, found {tok or 'end of input'!r}")
        self.i += 1
        return tok

    def var(self):
        tok = self.peek()
        if not re.fullmatch(r"[a-z][a-z0-9]*", tok or "") or tok in KEYWORDS:
            self.error(f"expected a variable, found {tok or 'end of input'!r}")
        return self.take()

    def formula(self):
        tok = self.peek()
        if tok == "!":
            self.take()
            return Not(self.formula())
        if tok in KEYWORDS:
            self.take()
            v = self.var()
            self.take(".")
            body = self.formula()
            return Exists(v, body) if tok == "exists" else Forall(v, body)
        if tok == "(":
            self.take()
            left = self.formula()
            if self.peek() == ")":
                self.take()
                return left
            op = self.peek()
            if op not in OPS:
                self.error(f"expected an operator or ')', found {op or 'end of input'!r}")
            while self.peek() == op:
                self.take()
                left = OPS[op](left, self.formula())
            if self.peek() in OPS:
                self.error("mixed operators need parentheses")
            self.take(")")
            return left
        if tok and tok[0].isupper():
            start = self.pos()
            self.take()
            if tok not in ARITY:
                self.error(f"unknown relation symbol {tok!r}", pos=start)
            self.take("(")
            args = [self.var()]
            while self.peek() == ",":
                self.take()
                args.append(self.var())
            self.take(")")
            if len(args) != ARITY[tok]:
                self.error(f"{tok} takes {ARITY[tok]} arguments, got {len(args)}", ArityError, start)
            return Atom(tok, tuple(args))
        if tok and tok[0].islower():
            left = self.var()
            self.take("=")
            return Eq(left, self.var())
        self.error(f"unexpected {tok or 'end of input'!r}")


def parse(text, line=None):
    p = _Parser(text, line)
    phi = p.formula()
    if p.peek():
        p.error(f"trailing input {p.peek()!r}")
    return phi


def parse_lines(text):
    """Parse one formula per line; blank lines and ``#`` comments are skipped.
    Returns (line number, formula) pairs."""
    out = []
    for no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if body.strip():
            out.append((no, parse(body, line=no)))
    return out
