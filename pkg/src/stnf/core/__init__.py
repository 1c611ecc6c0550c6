"""
formula-core: 有限型・項・式・型検査・代入・α同値・標準性・DSL
"""
from .alpha import alpha_equiv, canonical
from .dsl import parse_dsl, render_document, render_formula
from .errors import StnfError
from .formulas import (And, Atom, Exists, ExistsSt, Forall, ForallSt, Formula, Implies,
                       Not, Or, Pred, StAtom)
from .standardness import Classification, NormalForm, classify, infer_standard
from .substitution import FreshNames, substitute
from .terms import Term, Var
from .types import BASE, GRIDSET, REAL, TYPE1, Arrow, Seq
from .typing_rules import check_formula, typecheck

__all__ = [
    "alpha_equiv", "canonical", "parse_dsl", "render_document", "render_formula",
    "StnfError", "And", "Atom", "Exists", "ExistsSt", "Forall", "ForallSt", "Formula",
    "Implies", "Not", "Or", "Pred", "StAtom", "Classification", "NormalForm", "classify",
    "infer_standard", "FreshNames", "substitute", "Term", "Var", "BASE", "GRIDSET", "REAL",
    "TYPE1", "Arrow", "Seq", "check_formula", "typecheck",
]
