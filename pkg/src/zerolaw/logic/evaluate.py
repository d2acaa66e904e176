"""Satisfaction of formulas in finite structures.

``evaluate_naive`` is the direct recursive definition and serves as the
oracle.  ``evaluate`` compiles the formula into numbered nodes and memoizes
each node on the values of its free variables only, so a subformula that
does not mention an outer quantified variable is evaluated once.
"""
from __future__ import annotations

from .formula import BINARY, QUANT, And, Atom, Eq, Exists, Implies, Not, Or, free_vars, symbols


def _check(M, phi, asg):
    missing = free_vars(phi) - set(asg)
    if missing:
        raise ValueError(f"unbound free variables: {sorted(missing)}")
    if "S" in symbols(phi) and not M.has_successor:
        raise ValueError("formula uses S but the structure has no successor relation")
    for v in asg.values():
        if not (1 <= v <= M.n):
            raise ValueError(f"assigned vertex {v} outside the structure")


def _atom(M, sym, a, b):
    if sym == "E":
        return M.adjacent(a, b)
    return M.successor(a, b)


def evaluate_naive(M, phi, asg=None):
    asg = dict(asg or {})
    _check(M, phi, asg)
    return _naive(M, phi, asg)


def _naive(M, phi, asg):
    if isinstance(phi, Atom):
        return _atom(M, phi.symbol, asg[phi.args[0]], asg[phi.args[1]])
    if isinstance(phi, Eq):
        return asg[phi.left] == asg[phi.right]
    if isinstance(phi, Not):
        return not _naive(M, phi.body, asg)
    if isinstance(phi, And):
        return _naive(M, phi.left, asg) and _naive(M, phi.right, asg)
    if isinstance(phi, Or):
        return _naive(M, phi.left, asg) or _naive(M, phi.right, asg)
    if isinstance(phi, Implies):
        return (not _naive(M, phi.left, asg)) or _naive(M, phi.right, asg)
    want = isinstance(phi, Exists)
    for v in M.vertices:
        inner = dict(asg)
        inner[phi.var] = v
        if _naive(M, phi.body, inner) == want:
            return want
    return not want


class _Compiled:
    """Formula flattened into nodes; each node lists its free variables in a fixed order."""

    def __init__(self, phi):
        self.nodes = []
        self.root = self._add(phi)

    def _add(self, phi):
        fv = tuple(sorted(free_vars(phi)))
        if isinstance(phi, Atom):
            node = ("atom", phi.symbol, phi.args)
        elif isinstance(phi, Eq):
            node = ("eq", phi.left, phi.right)
        elif isinstance(phi, Not):
            node = ("not", self._add(phi.body))
        elif type(phi) in BINARY:
            node = (BINARY[type(phi)], self._add(phi.left), self._add(phi.right))
        elif type(phi) in QUANT:
            node = (QUANT[type(phi)], phi.var, self._add(phi.body))
        else:
            raise TypeError(f"not a formula: {phi!r}")
        self.nodes.append((node, fv))
        return len(self.nodes) - 1


class Evaluator:
    """Memoizing evaluator for one formula; reusable across structures."""

    def __init__(self, phi):
        self.phi = phi
        self.prog = _Compiled(phi)

    def __call__(self, M, asg=None):
        asg = dict(asg or {})
        _check(M, self.phi, asg)
        memo = {}
        nodes = self.prog.nodes
        verts = range(1, M.n + 1)

        def ev(i, env):
            node, fv = nodes[i]
            key = (i, tuple(env[v] for v in fv))
            hit = memo.get(key)
            if hit is not None:
                return hit
            tag = node[0]
            if tag == "atom":
                r = _atom(M, node[1], env[node[2][0]], env[node[2][1]])
            elif tag == "eq":
                r = env[node[1]] == env[node[2]]
            elif tag == "not":
                r = not ev(node[1], env)
            elif tag == "&":
                r = ev(node[1], env) and ev(node[2], env)
            elif tag == "|":
                r = ev(node[1], env) or ev(node[2], env)
            elif tag == "->":
                r = (not ev(node[1], env)) or ev(node[2], env)
            else:
                var, body = node[1], node[2]
                want = tag == "exists"
                saved = env.get(var)
                r = not want
                for v in verts:
                    env[var] = v
                    if ev(body, env) == want:
                        r = want
                        break
                if saved is None:
                    env.pop(var, None)
                else:
                    env[var] = saved
            memo[key] = r
            return r

        return ev(self.prog.root, asg)


def evaluate(M, phi, asg=None):
    return Evaluator(phi)(M, asg)


def satisfying_set(M, phi, var):
    """{v : M |= phi[v]} for a formula whose only free variable is ``var``."""
    ev = Evaluator(phi)
    return frozenset(v for v in M.vertices if ev(M, {var: v}))
