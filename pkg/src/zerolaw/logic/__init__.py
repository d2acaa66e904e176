"""First-order logic over the graph vocabulary {E} or {E, S}."""
from .evaluate import Evaluator, evaluate, evaluate_naive, satisfying_set
from .formula import (
    And, Atom, Eq, Exists, Forall, Formula, Implies, Not, Or, E, S, conj, disj,
    exists_many, free_vars, is_sentence, quantifier_depth, relativize, substitute, to_text,
)
from .parser import ArityError, FormulaSyntaxError, parse, parse_lines
from .types import (
    AmalgamTable, RankType, addition_check, amalgam_type_table, ef_game, equiv_d,
    hintikka_formula, rank_type,
)

__all__ = [
    "And", "Atom", "Eq", "Exists", "Forall", "Formula", "Implies", "Not", "Or", "E", "S",
    "conj", "disj", "exists_many", "free_vars", "is_sentence", "quantifier_depth",
    "relativize", "substitute", "to_text", "ArityError", "FormulaSyntaxError", "parse",
    "parse_lines", "Evaluator", "evaluate", "evaluate_naive", "satisfying_set",
    "AmalgamTable", "RankType", "addition_check", "amalgam_type_table", "ef_game",
    "equiv_d", "hintikka_formula", "rank_type",
]
