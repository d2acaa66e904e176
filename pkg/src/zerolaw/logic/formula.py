"""First-order formula AST over the vocabulary {E, S}, with printing,
free variables, quantifier depth, substitution and relativization."""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import reduce

ARITY = {"E": 2, "S": 2}
VAR_RE = re.compile(r"[a-z][a-z0-9]*\Z")
KEYWORDS = {"exists", "forall"}


class Formula:
    """Base class of all AST nodes."""

    def __str__(self):
        return to_text(self)

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __invert__(self):
        return Not(self)


@dataclass(frozen=True, repr=False)
class Atom(Formula):
    symbol: str
    args: tuple

    def __post_init__(self):
        if self.symbol not in ARITY:
            raise ValueError(f"unknown relation symbol {self.symbol!r}")
        if len(self.args) != ARITY[self.symbol]:
            raise ValueError(f"{self.symbol} takes {ARITY[self.symbol]} arguments, got {len(self.args)}")
        for v in self.args:
            _check_var(v)

    def __repr__(self):
        return f"Atom({self.symbol!r}, {self.args!r})"


@dataclass(frozen=True, repr=False)
class Eq(Formula):
    left: str
    right: str

    def __post_init__(self):
        _check_var(self.left)
        _check_var(self.right)

    def __repr__(self):
        return f"Eq({self.left!r}, {self.right!r})"


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula

    def __post_init__(self):
        _check_var(self.var)


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula

    def __post_init__(self):
        _check_var(self.var)


BINARY = {And: "&", Or: "|", Implies: "->"}
QUANT = {Exists: "exists", Forall: "forall"}


def _check_var(v):
    if not isinstance(v, str) or not VAR_RE.match(v) or v in KEYWORDS:
        raise ValueError(f"bad variable name {v!r}")


def E(x, y):
    return Atom("E", (x, y))


def S(x, y):
    return Atom("S", (x, y))


def conj(parts, empty=None):
    parts = list(parts)
    if not parts:
        return empty
    return reduce(And, parts)


def disj(parts, empty=None):
    parts = list(parts)
    if not parts:
        return empty
    return reduce(Or, parts)


def exists_many(vars_, body):
    for v in reversed(list(vars_)):
        body = Exists(v, body)
    return body


def to_text(phi):
    if isinstance(phi, Atom):
        return f"{phi.symbol}({','.join(phi.args)})"
    if isinstance(phi, Eq):
        return f"{phi.left}={phi.right}"
    if isinstance(phi, Not):
        return "!" + to_text(phi.body)
    if type(phi) in BINARY:
        return f"({to_text(phi.left)} {BINARY[type(phi)]} {to_text(phi.right)})"
    if type(phi) in QUANT:
        return f"{QUANT[type(phi)]} {phi.var}. {to_text(phi.body)}"
    raise TypeError(f"not a formula: {phi!r}")


def free_vars(phi):
    if isinstance(phi, Atom):
        return frozenset(phi.args)
    if isinstance(phi, Eq):
        return frozenset((phi.left, phi.right))
    if isinstance(phi, Not):
        return free_vars(phi.body)
    if type(phi) in BINARY:
        return free_vars(phi.left) | free_vars(phi.right)
    if type(phi) in QUANT:
        return free_vars(phi.body) - {phi.var}
    raise TypeError(f"not a formula: {phi!r}")


def all_vars(phi):
    if isinstance(phi, (Atom, Eq)):
        return free_vars(phi)
    if isinstance(phi, Not):
        return all_vars(phi.body)
    if type(phi) in BINARY:
        return all_vars(phi.left) | all_vars(phi.right)
    return all_vars(phi.body) | {phi.var}


def is_sentence(phi):
    return not free_vars(phi)


def quantifier_depth(phi):
    if isinstance(phi, (Atom, Eq)):
        return 0
    if isinstance(phi, Not):
        return quantifier_depth(phi.body)
    if type(phi) in BINARY:
        return max(quantifier_depth(phi.left), quantifier_depth(phi.right))
    if type(phi) in QUANT:
        return 1 + quantifier_depth(phi.body)
    raise TypeError(f"not a formula: {phi!r}")


def symbols(phi):
    if isinstance(phi, Atom):
        return frozenset((phi.symbol,))
    if isinstance(phi, Eq):
        return frozenset()
    if isinstance(phi, Not):
        return symbols(phi.body)
    if type(phi) in BINARY:
        return symbols(phi.left) | symbols(phi.right)
    return symbols(phi.body)


def fresh_var(avoid, stem="v"):
    i = 0
    while f"{stem}{i}" in avoid:
        i += 1
    return f"{stem}{i}"


def substitute(phi, mapping):
    """Replace free variables by variables, renaming bound ones to avoid capture."""
    mapping = {k: v for k, v in mapping.items() if k != v}
    if not mapping:
        return phi
    if isinstance(phi, Atom):
        return Atom(phi.symbol, tuple(mapping.get(v, v) for v in phi.args))
    if isinstance(phi, Eq):
        return Eq(mapping.get(phi.left, phi.left), mapping.get(phi.right, phi.right))
    if isinstance(phi, Not):
        return Not(substitute(phi.body, mapping))
    if type(phi) in BINARY:
        return type(phi)(substitute(phi.left, mapping), substitute(phi.right, mapping))
    inner = {k: v for k, v in mapping.items() if k != phi.var}
    live = {v for k, v in inner.items() if k in free_vars(phi.body)}
    var = phi.var
    if var in live:
        new = fresh_var(all_vars(phi.body) | live | set(inner), stem=var)
        inner[var] = new
        var = new
    return type(phi)(var, substitute(phi.body, inner))


def relativize(phi, guard, guard_var=None):
    """Restrict every quantifier of ``phi`` to the set defined by ``guard``.

    ``guard`` has exactly one free variable (or ``guard_var`` names it).
    """
    fv = free_vars(guard)
    if guard_var is None:
        if len(fv) != 1:
            raise ValueError("the guard must have exactly one free variable")
        (guard_var,) = fv
    elif not fv <= {guard_var}:
        raise ValueError("the guard must have no free variables besides its own")

    def rel(f):
        if isinstance(f, (Atom, Eq)):
            return f
        if isinstance(f, Not):
            return Not(rel(f.body))
        if type(f) in BINARY:
            return type(f)(rel(f.left), rel(f.right))
        g = substitute(guard, {guard_var: f.var})
        if isinstance(f, Exists):
            return Exists(f.var, And(g, rel(f.body)))
        return Forall(f.var, Implies(g, rel(f.body)))

    return rel(phi)
